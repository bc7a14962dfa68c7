use thiserror::Error;

/// Failure modes across the library. Coverage and I/O problems are
/// recoverable by the caller (bigger table, different path); `Internal`
/// signals a broken invariant and is never expected.
#[derive(Debug, Error)]
pub enum GoldbachError {
    #[error("E must be an even integer >= 4, got {0}")]
    BadEven(u64),
    #[error("sieve limit must be >= 2, got {0}")]
    BadLimit(u64),
    #[error("{what} needs prime coverage up to {needed}, table covers {limit}")]
    Coverage {
        what: &'static str,
        needed: u64,
        limit: u64,
    },
    #[error("{p} is not a sieve divisor for E={e}")]
    NotADivisor { e: u64, p: u64 },
    #[error("{0}")]
    Usage(String),
    #[error("sieve cache {path}: {reason}")]
    Cache { path: String, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, GoldbachError>;
