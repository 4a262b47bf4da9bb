//! Deciding `n = a*k + b*p_k` by fixed-point iteration on the prime-counting function.
//!
//! The iteration `k_{j+1} = π((n - a k_j) / b)` from `k_0 = π(n / b)` either settles on
//! a fixed point or on a two-element cycle (for `a > 0`), or climbs monotonically to a
//! fixed point (for `a < 0`). [`solver`] turns the settled pattern into a definitive
//! solution set; [`oracle`] provides independent bisection and brute-force answers;
//! [`engine`] supplies π(x), p_k and primality fast enough for n around 1e11 and beyond.

pub mod cli;
pub mod engine;
pub mod error;
pub mod ingest;
pub mod oracle;
pub mod solver;

pub use engine::{EngineConfig, PrimeEngine};
pub use error::{Error, Result};

pub use solver::{solve, EquationSpec, Outcome, Solver, Trajectory};

#[cfg(test)]
pub(crate) mod test_support {
    use std::sync::OnceLock;

    use crate::engine::{EngineConfig, PrimeEngine, MIN_SIEVE_LIMIT};

    /// Shared small-table engine for unit tests.
    pub fn engine() -> &'static PrimeEngine {
        static ENGINE: OnceLock<PrimeEngine> = OnceLock::new();
        ENGINE.get_or_init(|| {
            PrimeEngine::new(EngineConfig::default().with_sieve_limit(MIN_SIEVE_LIMIT)).unwrap()
        })
    }
}
