//! The fixed-point iteration `k_{j+1} = π((n - a k_j) / b)`, `k_0 = π(n / b)`, and the
//! translation of its settled pattern into the solution set of `n = a k + b p_k`.
//!
//! For `a > 0` the map `k ↦ π((n - a k) / b)` is nonincreasing, so even iterates
//! decrease, odd iterates increase, and the orbit ends on a fixed point or a
//! two-element cycle `{k', k''}`. A fixed point is the only candidate solution. A
//! cycle with `a <= b` has `k'' = k' + 1` and rules out any solution; with `a > b`
//! the gap may hide solutions strictly between `k'` and `k''`, which are tested
//! one by one.
//!
//! For `a < 0` the map is nondecreasing, the orbit climbs to a fixed point `k*` that
//! is never a solution, and solutions (possibly several) are found by scanning
//! upward from `k*` to an explicit bound past which `a k + b p_k > n`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::engine::{bounds, PrimeEngine};
use crate::error::{Error, Result};

/// The equation `n = a k + b p_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EquationSpec {
    a: i64,
    b: u64,
    n: u64,
}

impl EquationSpec {
    pub fn new(a: i64, b: u64, n: u64) -> Result<Self> {
        if a == 0 {
            return Err(Error::InvalidSpec("a must be nonzero".into()));
        }
        if b == 0 {
            return Err(Error::InvalidSpec("b must be at least 1".into()));
        }
        if n == 0 {
            return Err(Error::InvalidSpec("n must be positive".into()));
        }
        Ok(EquationSpec { a, b, n })
    }

    /// `n = k + p_k`.
    pub fn unit(n: u64) -> Result<Self> {
        Self::new(1, 1, n)
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn is_unit(&self) -> bool {
        self.a == 1 && self.b == 1
    }

    /// `a k + b p`, exactly.
    pub fn evaluate(&self, k: u64, p: u64) -> i128 {
        self.a as i128 * k as i128 + self.b as i128 * p as i128
    }

    /// `n - a k` before division.
    fn numerator(&self, k: u64) -> i128 {
        self.n as i128 - self.a as i128 * k as i128
    }

    /// `⌊(n - a k) / b⌋`, the argument handed to π.
    pub fn argument(&self, k: u64) -> Result<u64> {
        let num = self.numerator(k);
        if num < 0 {
            return Err(Error::DomainCollapse { k });
        }
        u64::try_from(num / self.b as i128).map_err(|_| Error::Range {
            value: u64::MAX,
            limit: u64::MAX,
        })
    }

    /// If `k` solves the equation, the prime `p_k` must be this value.
    fn required_prime(&self, k: u64) -> Option<u64> {
        let num = self.numerator(k);
        if num <= 0 || num % self.b as i128 != 0 {
            return None;
        }
        u64::try_from(num / self.b as i128).ok()
    }

    /// Hard cap on iteration steps: `4 ⌊log2(n + 2)⌋ + 64`.
    pub fn iteration_budget(&self) -> usize {
        let log2 = 63 - (self.n.saturating_add(2)).leading_zeros() as usize;
        4 * log2 + 64
    }
}

impl fmt::Display for EquationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}k + {}p_k", self.n, self.a, self.b)
    }
}

/// Terminal pattern of an orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Settled {
    Fixed { k: u64 },
    Cycle { lo: u64, hi: u64 },
}

/// The recorded orbit `k_0, k_1, ...` up to the first iterate that repeats the
/// terminal pattern.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trajectory {
    iterates: Vec<u64>,
    settled: Settled,
}

impl Trajectory {
    pub fn iterates(&self) -> &[u64] {
        &self.iterates
    }

    pub fn start(&self) -> u64 {
        self.iterates[0]
    }

    /// Step applications after `k_0` until the pattern is first confirmed: `j + 1`
    /// for `k_{j+1} = k_j`, `j + 2` for `k_{j+2} = k_j`.
    pub fn steps_to_settle(&self) -> usize {
        self.iterates.len() - 1
    }

    pub fn settled(&self) -> Settled {
        self.settled
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum Outcome {
    /// `k*` with `π((n - a k*) / b) = k*`, `a > 0`. `n_prime = a k* + b p_{k*}` is the
    /// largest value of `a j + b p_j` not exceeding `n`.
    FixedPoint {
        k_star: u64,
        n_prime: u64,
        is_solution: bool,
    },
    /// Cycle `{k', k' + 1}` with `0 < a <= b`: no solution exists.
    TwoCycle { k_lo: u64, k_hi: u64 },
    /// Cycle with `a > b`; every `k' < k < k''` was tested.
    GapCycle {
        k_lo: u64,
        k_hi: u64,
        interior_solutions: Vec<u64>,
    },
    /// `a < 0`: fixed point `k*` and every solution in `[k*, scan_upper_bound)`.
    NegativeScan {
        k_star: u64,
        solutions: Vec<u64>,
        scan_upper_bound: u64,
    },
    /// Small `n` where the iteration is not admissible, answered by enumeration.
    Enumerated { solutions: Vec<u64> },
}

impl Outcome {
    pub fn solutions(&self) -> Vec<u64> {
        match self {
            Outcome::FixedPoint {
                k_star,
                is_solution: true,
                ..
            } => vec![*k_star],
            Outcome::FixedPoint { .. } | Outcome::TwoCycle { .. } => Vec::new(),
            Outcome::GapCycle {
                interior_solutions, ..
            } => interior_solutions.clone(),
            Outcome::NegativeScan { solutions, .. } | Outcome::Enumerated { solutions } => {
                solutions.clone()
            }
        }
    }

    pub fn has_solution(&self) -> bool {
        !self.solutions().is_empty()
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            Outcome::FixedPoint { .. } => "FixedPoint",
            Outcome::TwoCycle { .. } => "TwoCycle",
            Outcome::GapCycle { .. } => "GapCycle",
            Outcome::NegativeScan { .. } => "NegativeScan",
            Outcome::Enumerated { .. } => "Enumerated",
        }
    }

    /// `k*` or the cycle pair, as printed in result tables.
    pub fn pattern(&self) -> String {
        match self {
            Outcome::FixedPoint { k_star, .. } | Outcome::NegativeScan { k_star, .. } => {
                k_star.to_string()
            }
            Outcome::TwoCycle { k_lo, k_hi } | Outcome::GapCycle { k_lo, k_hi, .. } => {
                format!("{{{k_lo}, {k_hi}}}")
            }
            Outcome::Enumerated { .. } => "-".into(),
        }
    }
}

fn join(ks: &[u64]) -> String {
    ks.iter().map(u64::to_string).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::FixedPoint {
                k_star,
                n_prime,
                is_solution: true,
            } => {
                write!(f, "solution k = {k_star} (fixed point, n' = {n_prime})")
            }
            Outcome::FixedPoint {
                k_star,
                n_prime,
                is_solution: false,
            } => {
                write!(f, "no solution (fixed point {k_star}, n' = {n_prime})")
            }
            Outcome::TwoCycle { k_lo, k_hi } => {
                write!(f, "no solution (2-cycle {{{k_lo},{k_hi}}})")
            }
            Outcome::GapCycle {
                k_lo,
                k_hi,
                interior_solutions,
            } if interior_solutions.is_empty() => {
                write!(f, "no solution (cycle {{{k_lo},{k_hi}}}, interior checked)")
            }
            Outcome::GapCycle {
                k_lo,
                k_hi,
                interior_solutions,
            } => {
                write!(
                    f,
                    "solution k = {} (inside cycle {{{k_lo},{k_hi}}})",
                    join(interior_solutions)
                )
            }
            Outcome::NegativeScan {
                k_star,
                solutions,
                scan_upper_bound,
            } if solutions.is_empty() => {
                write!(
                    f,
                    "no solution (fixed point {k_star}, scanned below {scan_upper_bound})"
                )
            }
            Outcome::NegativeScan {
                k_star, solutions, ..
            } => {
                write!(f, "solutions [{}] (fixed point {k_star})", join(solutions))
            }
            Outcome::Enumerated { solutions } if solutions.is_empty() => {
                write!(f, "no solution (direct enumeration)")
            }
            Outcome::Enumerated { solutions } => {
                write!(f, "solutions [{}] (direct enumeration)", join(solutions))
            }
        }
    }
}

/// Orbit plus verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solved {
    /// `None` when the equation was answered by enumeration.
    pub trajectory: Option<Trajectory>,
    pub outcome: Outcome,
}

/// Smallest `K >= 3` with `K (a + b (ln K + ln ln K - 1)) > n`. Since
/// `p_k >= k (ln k + ln ln k - 1)`, every `k >= K` has `a k + b p_k > n`, and the
/// left side is increasing from `K` on.
pub fn negative_scan_bound(spec: &EquationSpec) -> u64 {
    let (a, b, n) = (spec.a as f64, spec.b as f64, spec.n as f64);
    let exceeds = |k: u64| {
        let lower = a * k as f64 + b * bounds::nth_prime_lower(k);
        lower > n * (1.0 + 1e-12) + 1.0
    };
    if exceeds(3) {
        return 3;
    }
    let mut lo = 3u64; // !exceeds(lo)
    let mut hi = 6u64;
    while !exceeds(hi) {
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if exceeds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Stateless driver over a shared engine.
#[derive(Debug, Clone, Copy)]
pub struct Solver<'e> {
    engine: &'e PrimeEngine,
}

impl<'e> Solver<'e> {
    pub fn new(engine: &'e PrimeEngine) -> Self {
        Solver { engine }
    }

    pub fn engine(&self) -> &'e PrimeEngine {
        self.engine
    }

    /// One application of the map: `π(⌊(n - a k) / b⌋)`.
    pub fn step(&self, spec: &EquationSpec, k: u64) -> Result<u64> {
        self.engine.pi(spec.argument(k)?)
    }

    pub fn start(&self, spec: &EquationSpec) -> Result<u64> {
        self.engine.pi(spec.n / spec.b)
    }

    /// `k_1 = π((n - a π(n / b)) / b) >= 1`. Always true for `a < 0`, whose orbit
    /// never leaves the nonnegative integers.
    pub fn check_admissible(&self, spec: &EquationSpec) -> Result<bool> {
        if spec.a < 0 {
            return Ok(true);
        }
        let k0 = self.start(spec)?;
        match self.step(spec, k0) {
            Ok(k1) => Ok(k1 >= 1),
            Err(Error::DomainCollapse { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    }

    pub fn iterate(&self, spec: &EquationSpec) -> Result<Trajectory> {
        if !self.check_admissible(spec)? {
            return Err(Error::Inadmissible(format!(
                "k_1 = π((n - a π(n/b)) / b) < 1 for {spec}"
            )));
        }
        let budget = spec.iteration_budget();
        let mut iterates = vec![self.start(spec)?];
        loop {
            if iterates.len() > budget {
                return Err(Error::IterationBudgetExceeded { budget });
            }
            let j = iterates.len() - 1;
            let next = self.step(spec, iterates[j])?;
            iterates.push(next);
            if next == iterates[j] {
                return Ok(Trajectory {
                    iterates,
                    settled: Settled::Fixed { k: next },
                });
            }
            if j >= 1 && next == iterates[j - 1] {
                let other = iterates[j];
                if spec.a < 0 {
                    return Err(Error::Invariant(format!(
                        "cycle {{{next}, {other}}} for a < 0, where orbits are monotone"
                    )));
                }
                let settled = Settled::Cycle {
                    lo: next.min(other),
                    hi: next.max(other),
                };
                return Ok(Trajectory { iterates, settled });
            }
        }
    }

    /// Exact test of `a k + b p_k = n` without computing `p_k`: the required prime
    /// `(n - a k) / b` must be an integer, prime, and of index `k`.
    pub fn is_solution_at(&self, spec: &EquationSpec, k: u64) -> Result<bool> {
        if k == 0 {
            return Ok(false);
        }
        match spec.required_prime(k) {
            Some(q) if self.engine.is_prime(q)? => Ok(self.engine.pi(q)? == k),
            _ => Ok(false),
        }
    }

    pub fn classify(&self, spec: &EquationSpec, traj: &Trajectory) -> Result<Outcome> {
        match traj.settled {
            Settled::Fixed { k } if spec.a < 0 => self.scan_negative(spec, k),
            Settled::Fixed { k } => {
                // π(arg) = k*, so p_{k*} is the largest prime <= arg
                let arg = spec.argument(k)?;
                let p = self.engine.prev_prime(arg)?.ok_or_else(|| {
                    Error::Invariant(format!("fixed point {k} with π({arg}) = 0"))
                })?;
                let value = spec.evaluate(k, p);
                let n = spec.n as i128;
                if value > n {
                    return Err(Error::Invariant(format!(
                        "a k* + b p_k* = {value} exceeds n"
                    )));
                }
                Ok(Outcome::FixedPoint {
                    k_star: k,
                    n_prime: value as u64,
                    is_solution: value == n,
                })
            }
            Settled::Cycle { lo, hi } if spec.a as u64 <= spec.b => {
                if hi != lo + 1 {
                    return Err(Error::Invariant(format!(
                        "cycle {{{lo}, {hi}}} with a <= b must have gap 1"
                    )));
                }
                Ok(Outcome::TwoCycle { k_lo: lo, k_hi: hi })
            }
            Settled::Cycle { lo, hi } => {
                let mut interior_solutions = Vec::new();
                for k in lo + 1..hi {
                    if self.is_solution_at(spec, k)? {
                        interior_solutions.push(k);
                    }
                }
                Ok(Outcome::GapCycle {
                    k_lo: lo,
                    k_hi: hi,
                    interior_solutions,
                })
            }
        }
    }

    /// Every solution with `k >= k_star` for `a < 0`, scanning up to
    /// [`negative_scan_bound`].
    pub fn scan_negative(&self, spec: &EquationSpec, k_star: u64) -> Result<Outcome> {
        if spec.a >= 0 {
            return Err(Error::InvalidSpec(
                "the upward scan applies to a < 0 only".into(),
            ));
        }
        let upper = negative_scan_bound(spec);
        let first = k_star.max(1);
        let mut solutions = Vec::new();
        if first < upper {
            let n = spec.n as i128;
            let p_first = self.engine.nth_prime(first)?;
            let mut primes = self.engine.primes_from(p_first);
            for k in first..upper {
                let p = primes.next().ok_or(Error::Range {
                    value: u64::MAX,
                    limit: self.engine.supported_max(),
                })?;
                if spec.evaluate(k, p) == n {
                    solutions.push(k);
                }
            }
        }
        if solutions.first() == Some(&k_star) {
            return Err(Error::Invariant(format!(
                "fixed point {k_star} is a solution for a < 0"
            )));
        }
        Ok(Outcome::NegativeScan {
            k_star,
            solutions,
            scan_upper_bound: upper,
        })
    }

    /// Direct enumeration for equations the iteration cannot handle.
    fn enumerate(&self, spec: &EquationSpec) -> Result<Vec<u64>> {
        crate::oracle::brute_solutions(self.engine, spec, None)
    }

    pub fn solve_traced(&self, spec: &EquationSpec) -> Result<Solved> {
        if !self.check_admissible(spec)? {
            let solutions = self.enumerate(spec)?;
            return Ok(Solved {
                trajectory: None,
                outcome: Outcome::Enumerated { solutions },
            });
        }
        let trajectory = self.iterate(spec)?;
        let outcome = self.classify(spec, &trajectory)?;
        Ok(Solved {
            trajectory: Some(trajectory),
            outcome,
        })
    }

    pub fn solve(&self, spec: &EquationSpec) -> Result<Outcome> {
        Ok(self.solve_traced(spec)?.outcome)
    }
}

/// Solves `n = a k + b p_k` with the shared engine.
pub fn solve(engine: &PrimeEngine, spec: &EquationSpec) -> Result<Outcome> {
    Solver::new(engine).solve(spec)
}
