//! Combinatorial prime counting (Lucy_Hedgehog's dynamic program).
//!
//! Maintains `S(v)` = count of integers in `[2, v]` with no prime factor below the
//! current sieving prime, for every `v` of the form `x / i`. Sieving by `p` applies
//! `S(v) -= S(v / p) - S(p - 1)` for all `v >= p^2`. Time is O(x^{3/4} / log x), memory
//! O(sqrt x).

use super::sieve::isqrt;

/// Quotients below this bound are computed in `f64`: the distance from a non-integer
/// quotient to the next integer is then far larger than one rounding step.
const FLOAT_DIV_BOUND: u64 = 1 << 50;

/// π(x), exact for any `x < 2^64` that fits the memory budget (two arrays of
/// `sqrt(x)` entries).
pub fn count_primes(x: u64) -> u64 {
    if x < 2 {
        return 0;
    }
    let r = isqrt(x) as usize;
    if r < u32::MAX as usize && x < FLOAT_DIV_BOUND {
        run_fast(x, r)
    } else {
        run_generic(x, r)
    }
}

fn run_fast(x: u64, r: usize) -> u64 {
    // small[v] = S(v) for v <= r
    let mut small: Vec<u32> = (0..=r as u32).map(|v| v.saturating_sub(1)).collect();
    // large[i] = S(x / i) for 1 <= i <= r
    let mut large: Vec<u64> = (0..=r as u64)
        .map(|i| x.checked_div(i).map_or(0, |q| q - 1))
        .collect();
    let xf = x as f64;
    for p in 2..=r {
        if small[p] == small[p - 1] {
            continue;
        }
        let sp = small[p - 1] as u64;
        let p2 = p * p;
        let lim = r.min((x / p2 as u64) as usize);
        // i * p <= r reads the large table, otherwise x / (i p) <= r reads small
        let split = lim.min(r / p);
        for i in 1..=split {
            large[i] -= large[i * p] - sp;
        }
        for (i, l) in large.iter_mut().enumerate().take(lim + 1).skip(split + 1) {
            let q = (xf / (i * p) as f64) as usize;
            *l -= small[q] as u64 - sp;
        }
        if p2 <= r {
            let sp = sp as u32;
            let pu = p as u32;
            for j in (p2..=r).rev() {
                small[j] -= small[j / pu as usize] - sp;
            }
        }
    }
    large[1]
}

fn run_generic(x: u64, r: usize) -> u64 {
    let mut small: Vec<u64> = (0..=r as u64).map(|v| v.saturating_sub(1)).collect();
    let mut large: Vec<u64> = (0..=r as u64)
        .map(|i| x.checked_div(i).map_or(0, |q| q - 1))
        .collect();
    for p in 2..=r {
        if small[p] == small[p - 1] {
            continue;
        }
        let sp = small[p - 1];
        let p2 = (p as u64) * (p as u64);
        let lim = (r as u64).min(x / p2) as usize;
        for i in 1..=lim {
            let d = i * p;
            let v = if d <= r {
                large[d]
            } else {
                small[(x / d as u64) as usize]
            };
            large[i] -= v - sp;
        }
        if p2 <= r as u64 {
            for j in (p2 as usize..=r).rev() {
                small[j] -= small[j / p] - sp;
            }
        }
    }
    large[1]
}
