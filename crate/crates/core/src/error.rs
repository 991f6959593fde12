use thiserror::Error;

/// Errors raised by the set arithmetic, the container procedures and the estimators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid interval [{lo}, {hi}]: need 1 <= lo <= hi")]
    InvalidInterval { lo: u64, hi: u64 },

    #[error("element {value} lies outside the universe [{lo}, {hi}]")]
    OutOfUniverse { value: u64, lo: u64, hi: u64 },

    #[error("members must be strictly increasing (saw {prev} then {next})")]
    NotCanonical { prev: u64, next: u64 },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("enumeration budget exceeded: {needed} candidates > cap {cap}")]
    BudgetExceeded { needed: u128, cap: u128 },

    #[error("fingerprint supply exhausted: needed {needed} elements, only {available} available")]
    InsufficientFingerprintSupply { needed: usize, available: usize },

    #[error("fingerprint has {size} elements, above the padded target {target}")]
    FingerprintOverflow { size: usize, target: usize },

    #[error("iteration guard tripped after {iterations} iterations (bound {bound}): {reason}")]
    IterationGuardTripped {
        iterations: usize,
        bound: usize,
        reason: String,
    },

    #[error("invariant violated: {0}")]
    InvariantViolated(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
