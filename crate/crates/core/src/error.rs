use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies above the engine's configured ceiling.
    #[error("argument {value} exceeds the supported maximum {limit}")]
    Range { value: u64, limit: u64 },

    #[error("prime index {k} is out of range (the largest servable prime is at most {limit})")]
    IndexRange { k: u64, limit: u64 },

    #[error("invalid engine configuration: {0}")]
    Config(String),

    #[error("invalid equation: {0}")]
    InvalidSpec(String),

    /// `n - a*k` went negative, so the iterate has no prime to count.
    #[error("iterate argument (n - a*k)/b is negative at k = {k}; n is too small for this (a, b)")]
    DomainCollapse { k: u64 },

    #[error("equation is not admissible for the iteration: {0}")]
    Inadmissible(String),

    #[error("iteration did not settle within {budget} steps")]
    IterationBudgetExceeded { budget: usize },

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by the engine's numeric range.
    pub fn is_range(&self) -> bool {
        matches!(self, Error::Range { .. } | Error::IndexRange { .. })
    }
}
