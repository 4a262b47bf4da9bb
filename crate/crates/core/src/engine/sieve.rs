//! Odd-only bit sieves: the resident prime table and ad-hoc segments above it.
//!
//! Bit `i` of an odd sieve stands for the odd number `first + 2 i`. The prime 2 is
//! never stored and is accounted for by the callers.

/// Odd candidates per sieving block (2^18 odds, 2^19 integers).
const BLOCK_ODDS: usize = 1 << 18;

/// Largest table the `u32` prefix counts can describe comfortably.
pub const MAX_TABLE_LIMIT: u64 = 1 << 32;

/// Integer square root, exact for every `u64`.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

/// Plain sieve of Eratosthenes returning the odd primes up to `limit`.
pub fn small_odd_primes(limit: u64) -> Vec<u32> {
    let limit = limit as usize;
    if limit < 3 {
        return Vec::new();
    }
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    let mut i = 3;
    while i <= limit {
        if !composite[i] {
            out.push(i as u32);
            let mut m = i * i;
            while m <= limit {
                composite[m] = true;
                m += 2 * i;
            }
        }
        i += 2;
    }
    out
}

/// A run of odd numbers `first, first + 2, ...` with a primality bit per entry.
#[derive(Debug, Clone)]
pub struct OddSegment {
    first: u64,
    len: usize,
    bits: Vec<u64>,
}

impl OddSegment {
    /// Sieves the odd numbers in `[lo, hi]`. `base` must contain every odd prime up to
    /// `isqrt(hi)`; extra primes are ignored.
    pub fn sieve(lo: u64, hi: u64, base: &[u32]) -> Self {
        let first = if lo.is_multiple_of(2) { lo + 1 } else { lo };
        if first > hi {
            return OddSegment {
                first,
                len: 0,
                bits: Vec::new(),
            };
        }
        let len = ((hi - first) / 2 + 1) as usize;
        let words = len.div_ceil(64);
        let mut bits = vec![!0u64; words];
        if !len.is_multiple_of(64) {
            bits[words - 1] = (1u64 << (len % 64)) - 1;
        }
        if first == 1 {
            bits[0] &= !1;
        }
        let last = first + 2 * (len as u64 - 1);
        for &p in base {
            let p = p as u64;
            let sq = p * p;
            if sq > last {
                break;
            }
            // first odd multiple of p that is >= max(p^2, first)
            let m = if sq >= first {
                sq
            } else {
                let r = first % p;
                let mut m = if r == 0 { first } else { first + (p - r) };
                if m % 2 == 0 {
                    m += p;
                }
                m
            };
            if m > last {
                continue;
            }
            let mut idx = ((m - first) / 2) as usize;
            let step = p as usize;
            while idx < len {
                bits[idx >> 6] &= !(1u64 << (idx & 63));
                idx += step;
            }
        }
        OddSegment { first, len, bits }
    }

    pub fn first(&self) -> u64 {
        self.first
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn count(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_prime_at(&self, idx: usize) -> bool {
        self.bits[idx >> 6] >> (idx & 63) & 1 == 1
    }

    /// Odd primes of the segment in increasing order.
    pub fn primes(&self) -> impl DoubleEndedIterator<Item = u64> + '_ {
        let first = self.first;
        self.bits.iter().enumerate().flat_map(move |(w, &word)| {
            SetBits(word).map(move |b| first + 2 * ((w as u64) * 64 + b as u64))
        })
    }

    pub(crate) fn into_words(self) -> Vec<u64> {
        self.bits
    }
}

/// Iterator over the set bit positions of a word, both directions.
struct SetBits(u64);

impl Iterator for SetBits {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(b)
    }
}

impl DoubleEndedIterator for SetBits {
    fn next_back(&mut self) -> Option<u32> {
        if self.0 == 0 {
            return None;
        }
        let b = 63 - self.0.leading_zeros();
        self.0 &= !(1u64 << b);
        Some(b)
    }
}

/// Resident bit table of primes up to `limit` with per-word prefix counts, giving
/// O(1) prime counting and fast selection.
#[derive(Debug)]
pub struct PrimeTable {
    limit: u64,
    bits: Vec<u64>,
    /// `counts[w]` = odd primes stored before word `w`.
    counts: Vec<u32>,
}

impl PrimeTable {
    pub fn new(limit: u64) -> Self {
        assert!((2..=MAX_TABLE_LIMIT).contains(&limit));
        let base = small_odd_primes(isqrt(limit) + 1);
        let total_odds = ((limit - 1) / 2 + 1) as usize; // odd numbers 1..=limit
        let mut bits = Vec::with_capacity(total_odds.div_ceil(64));
        let mut start = 0usize;
        while start < total_odds {
            let end = (start + BLOCK_ODDS).min(total_odds);
            let lo = 2 * start as u64 + 1;
            let hi = 2 * (end as u64 - 1) + 1;
            bits.extend(OddSegment::sieve(lo, hi, &base).into_words());
            start = end;
        }
        let mut counts = Vec::with_capacity(bits.len());
        let mut acc = 0u32;
        for w in &bits {
            counts.push(acc);
            acc += w.count_ones();
        }
        PrimeTable {
            limit,
            bits,
            counts,
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Number of primes up to `limit`.
    pub fn total(&self) -> u64 {
        self.pi(self.limit)
    }

    /// π(x) for `x <= limit`.
    pub fn pi(&self, x: u64) -> u64 {
        debug_assert!(x <= self.limit);
        if x < 2 {
            return 0;
        }
        let idx = ((x - 1) / 2) as usize;
        let w = idx >> 6;
        let mask = if idx & 63 == 63 {
            !0
        } else {
            (1u64 << ((idx & 63) + 1)) - 1
        };
        1 + self.counts[w] as u64 + (self.bits[w] & mask).count_ones() as u64
    }

    pub fn is_prime(&self, x: u64) -> bool {
        debug_assert!(x <= self.limit);
        if x.is_multiple_of(2) {
            return x == 2;
        }
        let idx = (x / 2) as usize;
        self.bits[idx >> 6] >> (idx & 63) & 1 == 1
    }

    /// The k-th prime, for `1 <= k <= total()`.
    pub fn nth(&self, k: u64) -> u64 {
        debug_assert!(k >= 1 && k <= self.total());
        if k == 1 {
            return 2;
        }
        let rank = (k - 1) as u32; // rank among odd primes, 1-based
                                   // last word whose prefix count is below rank
        let w = self.counts.partition_point(|&c| c < rank) - 1;
        let mut word = self.bits[w];
        for _ in 1..(rank - self.counts[w]) {
            word &= word - 1;
        }
        2 * (w as u64 * 64 + word.trailing_zeros() as u64) + 1
    }

    /// Largest prime `<= x`, for `x <= limit`.
    pub fn prev_prime(&self, x: u64) -> Option<u64> {
        match self.pi(x) {
            0 => None,
            c => Some(self.nth(c)),
        }
    }

    /// Smallest prime `> x`, if it lies inside the table.
    pub fn next_prime(&self, x: u64) -> Option<u64> {
        if x >= self.limit {
            return None;
        }
        let c = self.pi(x);
        (c < self.total()).then(|| self.nth(c + 1))
    }

    /// Primes in `[lo, hi]` (clamped to the table), ascending.
    pub fn primes_between(&self, lo: u64, hi: u64) -> Vec<u64> {
        let hi = hi.min(self.limit);
        let mut out = Vec::new();
        if lo > hi {
            return out;
        }
        if lo <= 2 && hi >= 2 {
            out.push(2);
        }
        let first_idx = (lo.max(3) / 2) as usize;
        if hi < 3 || 2 * first_idx as u64 + 1 > hi {
            return out;
        }
        let last_idx = ((hi - 1) / 2) as usize;
        for w in first_idx >> 6..=last_idx >> 6 {
            let mut word = self.bits[w];
            if w == first_idx >> 6 {
                word &= !0u64 << (first_idx & 63);
            }
            if w == last_idx >> 6 && last_idx & 63 != 63 {
                word &= (1u64 << ((last_idx & 63) + 1)) - 1;
            }
            out.extend(SetBits(word).map(|b| 2 * (w as u64 * 64 + b as u64) + 1));
        }
        out
    }

    /// Odd primes up to `limit` as `u32`, for sieving segments above the table.
    pub fn odd_primes_upto(&self, limit: u64) -> Vec<u32> {
        let limit = limit.min(self.limit);
        let mut out = Vec::new();
        for (w, &word) in self.bits.iter().enumerate() {
            for b in SetBits(word) {
                let p = 2 * (w as u64 * 64 + b as u64) + 1;
                if p > limit {
                    return out;
                }
                out.push(p as u32);
            }
        }
        out
    }
}
