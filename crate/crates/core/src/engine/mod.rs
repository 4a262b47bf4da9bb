//! Prime services: π(x), p_k and primality over a configurable range.
//!
//! Three tiers answer π(x):
//!
//! * a resident odd-only bit table up to `sieve_limit` (O(1) per query);
//! * a segmented sieve counting primes between `x` and the nearest value whose
//!   count is already known, when that neighbour is close enough;
//! * Lucy_Hedgehog's combinatorial count otherwise.
//!
//! Every answer from the last two tiers is memoised. The fixed-point iteration
//! queries arguments that converge quickly, so after the first two or three
//! combinatorial counts the remaining queries are cheap deltas.

pub mod bounds;
pub mod lucy;
pub mod miller_rabin;
pub mod sieve;

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use serde::Serialize;

use crate::error::{Error, Result};
use sieve::{isqrt, OddSegment, PrimeTable, MAX_TABLE_LIMIT};

pub const DEFAULT_SIEVE_LIMIT: u64 = 100_000_000;
pub const MIN_SIEVE_LIMIT: u64 = 1_000_000;
pub const DEFAULT_SUPPORTED_MAX: u64 = 100_000_000_000;
/// Ceiling of the opt-in large mode, enough for F_70 ≈ 1.9e14.
pub const LARGE_SUPPORTED_MAX: u64 = 200_000_000_000_000;
/// Hard ceiling: Lucy's tables for 1e15 take ~400 MB.
pub const MAX_SUPPORTED_MAX: u64 = 1_000_000_000_000_000;
pub const SIEVE_LIMIT_ENV: &str = "PRIMEPOINT_SIEVE_LIMIT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EngineConfig {
    /// Highest x answered from the resident table.
    pub sieve_limit: u64,
    /// Highest argument accepted by any query.
    pub supported_max: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            sieve_limit: DEFAULT_SIEVE_LIMIT,
            supported_max: DEFAULT_SUPPORTED_MAX,
        }
    }
}

impl EngineConfig {
    pub fn large() -> Self {
        EngineConfig {
            supported_max: LARGE_SUPPORTED_MAX,
            ..Self::default()
        }
    }

    pub fn with_sieve_limit(mut self, sieve_limit: u64) -> Self {
        self.sieve_limit = sieve_limit;
        self
    }

    pub fn with_supported_max(mut self, supported_max: u64) -> Self {
        self.supported_max = supported_max;
        self
    }

    /// Applies `PRIMEPOINT_SIEVE_LIMIT` when set.
    pub fn with_env(self) -> Result<Self> {
        match std::env::var(SIEVE_LIMIT_ENV) {
            Ok(v) => {
                let limit = parse_count(v.trim()).ok_or_else(|| {
                    Error::Config(format!(
                        "{SIEVE_LIMIT_ENV}={v:?} is not a nonnegative integer"
                    ))
                })?;
                Ok(self.with_sieve_limit(limit))
            }
            Err(_) => Ok(self),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sieve_limit < MIN_SIEVE_LIMIT {
            return Err(Error::Config(format!(
                "sieve_limit {} is below the minimum {MIN_SIEVE_LIMIT}",
                self.sieve_limit
            )));
        }
        if self.sieve_limit > MAX_TABLE_LIMIT {
            return Err(Error::Config(format!(
                "sieve_limit {} is above the maximum {MAX_TABLE_LIMIT}",
                self.sieve_limit
            )));
        }
        if self.supported_max > MAX_SUPPORTED_MAX {
            return Err(Error::Config(format!(
                "supported_max {} is above the maximum {MAX_SUPPORTED_MAX}",
                self.supported_max
            )));
        }
        Ok(())
    }
}

/// Accepts plain integers as well as `1e8`-style powers of ten.
pub fn parse_count(s: &str) -> Option<u64> {
    if let Ok(v) = s.replace('_', "").parse::<u64>() {
        return Some(v);
    }
    let (mant, exp) = s.split_once(['e', 'E'])?;
    let mant: u64 = mant.parse().ok()?;
    let exp: u32 = exp.parse().ok()?;
    mant.checked_mul(10u64.checked_pow(exp)?)
}

/// Counters describing how queries were answered.
#[derive(Debug, Default, Clone, Copy, Serialize, PartialEq, Eq)]
pub struct EngineStats {
    pub combinatorial: u64,
    pub delta: u64,
    pub cache_hits: u64,
}

#[derive(Debug)]
pub struct PrimeEngine {
    config: EngineConfig,
    table: PrimeTable,
    /// Odd primes up to sqrt(supported_max), for sieving segments above the table.
    base: Vec<u32>,
    cache: Mutex<BTreeMap<u64, u64>>,
    combinatorial: AtomicU64,
    delta: AtomicU64,
    cache_hits: AtomicU64,
}

impl PrimeEngine {
    pub fn new(config: EngineConfig) -> Result<Self> {
        config.validate()?;
        let base_limit = isqrt(config.supported_max) + 1;
        // the table has to carry the sieving primes for every segment we may need
        let sieve_limit = config.sieve_limit.max(base_limit + 1);
        let config = EngineConfig {
            sieve_limit,
            ..config
        };
        let table = PrimeTable::new(sieve_limit);
        let base = table.odd_primes_upto(base_limit + 1);
        let mut cache = BTreeMap::new();
        cache.insert(sieve_limit, table.total());
        Ok(PrimeEngine {
            config,
            table,
            base,
            cache: Mutex::new(cache),
            combinatorial: AtomicU64::new(0),
            delta: AtomicU64::new(0),
            cache_hits: AtomicU64::new(0),
        })
    }

    pub fn config(&self) -> EngineConfig {
        self.config
    }

    pub fn sieve_limit(&self) -> u64 {
        self.config.sieve_limit
    }

    pub fn supported_max(&self) -> u64 {
        self.config.supported_max
    }

    pub fn stats(&self) -> EngineStats {
        EngineStats {
            combinatorial: self.combinatorial.load(Ordering::Relaxed),
            delta: self.delta.load(Ordering::Relaxed),
            cache_hits: self.cache_hits.load(Ordering::Relaxed),
        }
    }

    fn check_range(&self, x: u64) -> Result<()> {
        if x > self.config.supported_max {
            return Err(Error::Range {
                value: x,
                limit: self.config.supported_max,
            });
        }
        Ok(())
    }

    /// Number of primes `<= x`.
    pub fn pi(&self, x: u64) -> Result<u64> {
        self.check_range(x)?;
        if x <= self.table.limit() {
            return Ok(self.table.pi(x));
        }
        let (below, above) = {
            let cache = self.cache.lock().unwrap();
            if let Some(&c) = cache.get(&x) {
                self.cache_hits.fetch_add(1, Ordering::Relaxed);
                return Ok(c);
            }
            (
                cache.range(..x).next_back().map(|(&k, &v)| (k, v)),
                cache.range(x..).next().map(|(&k, &v)| (k, v)),
            )
        };
        let window = delta_window(x);
        let from_below = below.filter(|&(y, _)| x - y <= window);
        let from_above = above.filter(|&(y, _)| y - x <= window);
        let count = match (from_below, from_above) {
            (Some((y, _)), Some((z, d))) if z - x < x - y => d - self.count_between(x, z),
            (Some((y, c)), _) => c + self.count_between(y, x),
            (None, Some((z, d))) => d - self.count_between(x, z),
            (None, None) => {
                self.combinatorial.fetch_add(1, Ordering::Relaxed);
                lucy::count_primes(x)
            }
        };
        if from_below.is_some() || from_above.is_some() {
            self.delta.fetch_add(1, Ordering::Relaxed);
        }
        self.remember(x, count);
        Ok(count)
    }

    fn remember(&self, x: u64, count: u64) {
        if x > self.table.limit() {
            self.cache.lock().unwrap().insert(x, count);
        }
    }

    /// π(x) from the resident table, `None` above `sieve_limit`.
    pub fn pi_tabulated(&self, x: u64) -> Option<u64> {
        (x <= self.table.limit()).then(|| self.table.pi(x))
    }

    /// π(x) from the combinatorial backend alone, bypassing table and cache.
    pub fn pi_combinatorial(&self, x: u64) -> Result<u64> {
        self.check_range(x)?;
        Ok(lucy::count_primes(x))
    }

    /// Primes `p` with `lo < p <= hi`, counted by segmented sieving.
    pub fn count_between(&self, lo: u64, hi: u64) -> u64 {
        if hi <= lo {
            return 0;
        }
        if hi <= self.table.limit() {
            return self.table.pi(hi) - self.table.pi(lo);
        }
        let mut total = 0;
        let mut start = lo + 1;
        if start <= 2 {
            total += 1;
            start = 3;
        }
        let block = block_span(hi);
        while start <= hi {
            let end = hi.min(start.saturating_add(block - 1));
            total += OddSegment::sieve(start, end, &self.base).count();
            start = end + 1;
        }
        total
    }

    pub fn is_prime(&self, x: u64) -> Result<bool> {
        self.check_range(x)?;
        if x <= self.table.limit() {
            Ok(self.table.is_prime(x))
        } else {
            Ok(miller_rabin::is_prime_u64(x))
        }
    }

    /// Largest prime `<= x`, `None` for `x < 2`.
    pub fn prev_prime(&self, x: u64) -> Result<Option<u64>> {
        self.check_range(x)?;
        if x <= self.table.limit() {
            return Ok(self.table.prev_prime(x));
        }
        let mut y = if x.is_multiple_of(2) { x - 1 } else { x };
        while !miller_rabin::is_prime_u64(y) {
            y -= 2;
        }
        Ok(Some(y))
    }

    /// Smallest prime `> x`.
    pub fn next_prime(&self, x: u64) -> Result<u64> {
        self.check_range(x)?;
        if let Some(p) = self.table.next_prime(x) {
            return Ok(p);
        }
        let mut y = if x.is_multiple_of(2) { x + 1 } else { x + 2 };
        while !miller_rabin::is_prime_u64(y) {
            y += 2;
        }
        self.check_range(y)?;
        Ok(y)
    }

    /// The k-th prime (`p_1 = 2`).
    ///
    /// Above the table: bracket `p_k` with explicit bounds, run a safeguarded
    /// secant/bisection search on π until the remaining distance is small, then count
    /// primes exactly with a segmented sieve.
    pub fn nth_prime(&self, k: u64) -> Result<u64> {
        let limit = self.config.supported_max;
        if k == 0 {
            return Err(Error::IndexRange { k, limit });
        }
        if k <= self.table.total() {
            return Ok(self.table.nth(k));
        }
        let (lo_bound, hi_bound) = bounds::nth_prime_bracket(k);
        if lo_bound >= limit {
            return Err(Error::IndexRange { k, limit });
        }
        // invariant: pi(lo) < k <= pi(hi) (hi only once verified or from the bound)
        let mut lo = lo_bound.max(self.table.limit());
        let mut hi = hi_bound.min(limit);
        let mut x = (bounds::nth_prime_estimate(k) as u64).clamp(lo + 1, hi);
        loop {
            let c = self.pi(x)?;
            let window = delta_window(x);
            let ln = (x as f64).ln();
            if c >= k {
                hi = x;
                if ((c - k) as f64 * ln) as u64 <= window {
                    let p = self.scan_down(x, c - k + 1);
                    self.remember(p, k);
                    return Ok(p);
                }
            } else {
                if x == limit {
                    return Err(Error::IndexRange { k, limit });
                }
                lo = x;
                if ((k - c) as f64 * ln) as u64 <= window {
                    let p = self.scan_up(x, k - c)?;
                    self.remember(p, k);
                    return Ok(p);
                }
            }
            let guess = x as f64 + (k as f64 - c as f64) * ln;
            x = if guess > lo as f64 && guess < hi as f64 {
                guess as u64
            } else {
                lo + (hi - lo) / 2
            };
            if x <= lo || x > hi {
                x = hi;
            }
        }
    }

    /// The `rank`-th prime `> x` (rank 1 = next prime).
    fn scan_up(&self, x: u64, rank: u64) -> Result<u64> {
        let limit = self.config.supported_max;
        let block = block_span(x);
        let mut need = rank;
        let mut start = x + 1;
        loop {
            if start > limit {
                return Err(Error::Range {
                    value: start,
                    limit,
                });
            }
            let end = limit.min(start.saturating_add(block - 1));
            let seg = OddSegment::sieve(start, end, &self.base);
            let c = seg.count();
            if c >= need {
                return Ok(seg.primes().nth((need - 1) as usize).unwrap());
            }
            need -= c;
            start = end + 1;
        }
    }

    /// The `rank`-th largest prime `<= x` (rank 1 = prev prime). Only used above the
    /// table, where every prime is odd.
    fn scan_down(&self, x: u64, rank: u64) -> u64 {
        let block = block_span(x);
        let mut need = rank;
        let mut end = x;
        loop {
            let start = end.saturating_sub(block - 1).max(3);
            let seg = OddSegment::sieve(start, end, &self.base);
            let c = seg.count();
            if c >= need {
                return seg.primes().rev().nth((need - 1) as usize).unwrap();
            }
            need -= c;
            end = start - 1;
        }
    }

    /// Ascending primes `>= start`, stopping at `supported_max`.
    pub fn primes_from(&self, start: u64) -> PrimeIter<'_> {
        PrimeIter {
            engine: self,
            next_lo: start,
            buf: Vec::new(),
            pos: 0,
            span: 1 << 10,
        }
    }
}

/// Largest distance bridged by sieving instead of a fresh combinatorial count.
/// Sieving costs a few ns per integer; Lucy costs a few ns per unit of x^{3/4}.
fn delta_window(x: u64) -> u64 {
    ((x as f64).powf(0.75) as u64).max(1 << 24)
}

/// Integers per sieving block: large enough to amortise the base-prime sweep.
fn block_span(hi: u64) -> u64 {
    (4 * isqrt(hi)).clamp(1 << 20, 1 << 26)
}

/// Lazy ascending prime iterator backed by the table and then by segments.
pub struct PrimeIter<'a> {
    engine: &'a PrimeEngine,
    next_lo: u64,
    buf: Vec<u64>,
    pos: usize,
    span: u64,
}

impl PrimeIter<'_> {
    fn refill(&mut self) -> bool {
        let limit = self.engine.config.supported_max;
        self.buf.clear();
        self.pos = 0;
        while self.buf.is_empty() {
            if self.next_lo > limit {
                return false;
            }
            let lo = self.next_lo;
            let table_limit = self.engine.table.limit();
            let hi = if lo <= table_limit {
                table_limit.min(lo.saturating_add(self.span - 1))
            } else {
                limit.min(lo.saturating_add(block_span(lo) - 1))
            };
            if lo <= table_limit {
                self.buf = self.engine.table.primes_between(lo, hi);
                self.span = (self.span * 2).min(1 << 20);
            } else {
                self.buf
                    .extend(OddSegment::sieve(lo, hi, &self.engine.base).primes());
            }
            self.next_lo = hi + 1;
        }
        true
    }
}

impl Iterator for PrimeIter<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.pos >= self.buf.len() && !self.refill() {
            return None;
        }
        let p = self.buf[self.pos];
        self.pos += 1;
        Some(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_engine() -> PrimeEngine {
        PrimeEngine::new(EngineConfig::default().with_sieve_limit(MIN_SIEVE_LIMIT)).unwrap()
    }

    #[test]
    fn known_small_values() {
        let e = small_engine();
        assert_eq!(e.pi(1).unwrap(), 0);
        assert_eq!(e.pi(51).unwrap(), 15);
        assert_eq!(e.pi(1_000_000).unwrap(), 78_498);
        assert_eq!(e.nth_prime(10).unwrap(), 29);
        assert_eq!(e.nth_prime(12).unwrap(), 37);
        assert_eq!(e.nth_prime(41).unwrap(), 179);
        assert_eq!(e.nth_prime(51).unwrap(), 233);
        assert_eq!(e.nth_prime(2000).unwrap(), 17_389);
        assert!(!e.is_prime(1).unwrap());
        assert!(e.is_prime(31).unwrap());
        assert!(!e.is_prime(49).unwrap());
    }

    #[test]
    fn range_errors() {
        let e = small_engine();
        let max = e.supported_max();
        assert!(matches!(e.pi(max + 1), Err(Error::Range { .. })));
        assert!(matches!(e.is_prime(max + 1), Err(Error::Range { .. })));
        assert!(matches!(e.nth_prime(0), Err(Error::IndexRange { .. })));
        assert!(matches!(e.nth_prime(max), Err(Error::IndexRange { .. })));
    }

    #[test]
    fn config_validation() {
        let low = EngineConfig::default().with_sieve_limit(999_999);
        assert!(matches!(PrimeEngine::new(low), Err(Error::Config(_))));
        let huge = EngineConfig::default().with_supported_max(MAX_SUPPORTED_MAX + 1);
        assert!(matches!(PrimeEngine::new(huge), Err(Error::Config(_))));
        assert_eq!(parse_count("1e8"), Some(100_000_000));
        assert_eq!(parse_count("10_000_000"), Some(10_000_000));
        assert_eq!(parse_count("abc"), None);
    }

    #[test]
    fn above_table_values() {
        let e = small_engine();
        // OEIS A006880 / A006988
        assert_eq!(e.pi(10_000_000).unwrap(), 664_579);
        assert_eq!(e.pi(100_000_000).unwrap(), 5_761_455);
        assert_eq!(e.nth_prime(664_579).unwrap(), 9_999_991);
        assert_eq!(e.nth_prime(1_000_000).unwrap(), 15_485_863);
        assert_eq!(e.nth_prime(10_000_000).unwrap(), 179_424_673);
        assert_eq!(e.prev_prime(10_000_000).unwrap(), Some(9_999_991));
        assert_eq!(e.next_prime(9_999_991).unwrap(), 10_000_019);
        // delta path: close to a cached value
        assert_eq!(e.pi(100_000_007).unwrap(), 5_761_456);
        assert!(e.stats().delta >= 1);
    }

    #[test]
    fn prime_iter_crosses_the_table_boundary() {
        let e = small_engine();
        let got: Vec<u64> = e
            .primes_from(999_900)
            .take_while(|&p| p < 1_000_200)
            .collect();
        let expect: Vec<u64> = (999_900..1_000_200)
            .filter(|&x| miller_rabin::is_prime_u64(x))
            .collect();
        assert_eq!(got, expect);
        let first: Vec<u64> = e.primes_from(0).take(5).collect();
        assert_eq!(first, vec![2, 3, 5, 7, 11]);
    }
}
