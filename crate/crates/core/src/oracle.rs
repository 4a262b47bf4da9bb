//! Independent answers for cross-checking the iteration: bisection on the monotone
//! `f(k) = a k + b p_k - n` (for `a > 0`) and exhaustive enumeration. Neither uses the
//! fixed-point map; both evaluate `p_k` directly.

use serde::Serialize;

use crate::engine::PrimeEngine;
use crate::error::{Error, Result};
use crate::solver::{negative_scan_bound, EquationSpec};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BisectionRun {
    pub spec: EquationSpec,
    /// Final bracket, `f(lo) < 0 <= f(hi)` (both 1 when `k = 1` already solves it).
    pub lo: u64,
    pub hi: u64,
    /// Midpoint evaluations.
    pub iterations: u32,
    pub result: Option<u64>,
}

/// `f(k) = a k + b p_k - n`.
fn f(engine: &PrimeEngine, spec: &EquationSpec, k: u64) -> Result<i128> {
    Ok(spec.evaluate(k, engine.nth_prime(k)?) - spec.n() as i128)
}

/// Bisection with midpoint `⌊(lo + hi) / 2⌋` until `hi - lo <= 1`. For `a = b = 1`
/// the bracket is `(1, n)`; otherwise `hi` is the first power of two with `f >= 0`.
pub fn bisect(engine: &PrimeEngine, spec: &EquationSpec) -> Result<BisectionRun> {
    let (a, b, n) = (spec.a(), spec.b(), spec.n());
    if a <= 0 {
        return Err(Error::InvalidSpec(
            "bisection needs a > 0 (monotone f)".into(),
        ));
    }
    if (n as i128) < a as i128 + 2 * b as i128 {
        return Err(Error::InvalidSpec(format!(
            "bisection needs n >= a + 2b, got {spec}"
        )));
    }
    let run = |lo, hi, iterations, result| BisectionRun {
        spec: *spec,
        lo,
        hi,
        iterations,
        result,
    };
    let f_lo = f(engine, spec, 1)?;
    if f_lo == 0 {
        return Ok(run(1, 1, 0, Some(1)));
    }
    let lo = 1u64;
    // f(hi), when it has been evaluated
    let (mut hi, mut f_hi) = if spec.is_unit() {
        // f(n) = p_n > 0 without computing p_n
        (n, None)
    } else {
        let mut hi = 2u64;
        loop {
            let v = f(engine, spec, hi)?;
            if v >= 0 {
                break (hi, Some(v));
            }
            hi *= 2;
        }
    };
    let mut lo = lo;
    let mut iterations = 0;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let v = f(engine, spec, mid)?;
        iterations += 1;
        if v < 0 {
            lo = mid;
        } else {
            hi = mid;
            f_hi = Some(v);
        }
    }
    Ok(run(lo, hi, iterations, (f_hi == Some(0)).then_some(hi)))
}

/// Every `k` in `[1, k_max]` with `a k + b p_k = n`, by direct evaluation.
///
/// Automatic `k_max`: the largest `k` with `a k + b p_k <= n` when `a > 0`; one below
/// the upward-scan bound of the solver when `a < 0`.
pub fn brute_solutions(
    engine: &PrimeEngine,
    spec: &EquationSpec,
    k_max: Option<u64>,
) -> Result<Vec<u64>> {
    let n = spec.n() as i128;
    let bound = match k_max {
        Some(k) => k,
        None if spec.a() < 0 => negative_scan_bound(spec) - 1,
        None => u64::MAX,
    };
    let stop_when_above = k_max.is_none() && spec.a() > 0;
    let mut out = Vec::new();
    let mut primes = engine.primes_from(2);
    for k in 1..=bound {
        let Some(p) = primes.next() else {
            return Err(Error::Range {
                value: u64::MAX,
                limit: engine.supported_max(),
            });
        };
        let v = spec.evaluate(k, p);
        if v == n {
            out.push(k);
        } else if v > n && stop_when_above {
            break;
        }
    }
    Ok(out)
}
