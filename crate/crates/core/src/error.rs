use thiserror::Error;

/// Errors raised by construction, decomposition and verification.
#[derive(Debug, Error)]
pub enum Error {
    /// Inputs do not fit together (wrong sizes, unknown points, dimension mismatch).
    #[error("domain error: {0}")]
    Domain(String),

    /// A structural invariant of a type would be violated (weights, partitions, marginals).
    #[error("invariant violation: {0}")]
    Invariant(String),

    /// An operation's precondition does not hold (not a martingale, nonzero conditional mean).
    #[error("precondition violation: {0}")]
    Precondition(String),

    /// A random vector is not constant on the blocks of the partition it must be measurable for.
    #[error("measurability violation: {0}")]
    Measurability(String),

    /// A stage produced a zero approximation for a nonzero residual; signals a transport bug.
    #[error("degenerate stage: {0}")]
    Degenerate(String),

    /// A file does not match the documented schema.
    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;
