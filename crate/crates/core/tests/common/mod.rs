//! Test-only ground truth, independent of the engine.

#![allow(dead_code)]

use std::sync::OnceLock;

use primepoint::engine::{EngineConfig, PrimeEngine, MIN_SIEVE_LIMIT};

/// Odd-only bitset sieve: bit i <=> 2i + 1 is prime.
pub struct DirectSieve {
    limit: u64,
    bits: Vec<u64>,
    /// prefix[w] = odd primes before word w
    prefix: Vec<u64>,
}

impl DirectSieve {
    pub fn new(limit: u64) -> Self {
        let odds = (limit / 2 + 1) as usize;
        let mut bits = vec![!0u64; odds.div_ceil(64)];
        bits[0] &= !1; // 1
        let mut i = 1usize;
        while (2 * i + 1) * (2 * i + 1) <= limit as usize {
            if bits[i >> 6] >> (i & 63) & 1 == 1 {
                let p = 2 * i + 1;
                let mut j = (p * p) / 2;
                while j < odds {
                    bits[j >> 6] &= !(1u64 << (j & 63));
                    j += p;
                }
            }
            i += 1;
        }
        // clear bits past the limit
        for j in odds..bits.len() * 64 {
            bits[j >> 6] &= !(1u64 << (j & 63));
        }
        if limit.is_multiple_of(2) && odds > 0 {
            // 2 * (odds - 1) + 1 = limit + 1 > limit
            let j = odds - 1;
            if 2 * j as u64 + 1 > limit {
                bits[j >> 6] &= !(1u64 << (j & 63));
            }
        }
        let mut prefix = Vec::with_capacity(bits.len());
        let mut acc = 0;
        for w in &bits {
            prefix.push(acc);
            acc += w.count_ones() as u64;
        }
        DirectSieve {
            limit,
            bits,
            prefix,
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn is_prime(&self, x: u64) -> bool {
        assert!(x <= self.limit);
        if x.is_multiple_of(2) {
            return x == 2;
        }
        let i = (x / 2) as usize;
        self.bits[i >> 6] >> (i & 63) & 1 == 1
    }

    pub fn pi(&self, x: u64) -> u64 {
        assert!(x <= self.limit);
        if x < 2 {
            return 0;
        }
        let i = ((x - 1) / 2) as usize;
        let w = i >> 6;
        let mask = if i & 63 == 63 {
            !0
        } else {
            (1u64 << ((i & 63) + 1)) - 1
        };
        1 + self.prefix[w] + (self.bits[w] & mask).count_ones() as u64
    }

    pub fn primes(&self) -> Vec<u64> {
        let mut out = vec![2];
        out.extend((3..=self.limit).step_by(2).filter(|&x| self.is_prime(x)));
        out
    }
}

/// Direct sieve to 2e6, shared across tests.
pub fn small_sieve() -> &'static DirectSieve {
    static S: OnceLock<DirectSieve> = OnceLock::new();
    S.get_or_init(|| DirectSieve::new(2_000_000))
}

/// Engine with the minimum table, so that most of the tiers get exercised.
pub fn small_engine() -> &'static PrimeEngine {
    static E: OnceLock<PrimeEngine> = OnceLock::new();
    E.get_or_init(|| {
        PrimeEngine::new(EngineConfig::default().with_sieve_limit(MIN_SIEVE_LIMIT)).unwrap()
    })
}

/// Engine with the default configuration.
pub fn default_engine() -> &'static PrimeEngine {
    static E: OnceLock<PrimeEngine> = OnceLock::new();
    E.get_or_init(|| PrimeEngine::new(EngineConfig::default()).unwrap())
}

/// `table[n]` = every k with `a k + b p_k = n`, for `n <= n_max`, built by walking
/// the prime list once. Complete as long as `a k + b p_k > n_max` past the list end.
pub fn solution_table(primes: &[u64], a: i64, b: u64, n_max: u64) -> Vec<Vec<u64>> {
    assert!(a != 0 && b >= 1);
    let mut table = vec![Vec::new(); n_max as usize + 1];
    for (i, &p) in primes.iter().enumerate() {
        let k = i as i128 + 1;
        let v = a as i128 * k + b as i128 * p as i128;
        if (1..=n_max as i128).contains(&v) {
            table[v as usize].push(k as u64);
        }
    }
    // Beyond the list, p_k >= k (ln k + ln ln k - 1) keeps every value above n_max.
    let k = primes.len() as f64 + 1.0;
    let floor = k * (a as f64 + b as f64 * (k.ln() + k.ln().ln() - 1.0));
    assert!(a > 0 || floor > n_max as f64 * 2.0, "prime list too short");
    table
}
