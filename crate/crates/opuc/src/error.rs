//! Error type shared by all modules.

/// Library error. Variants map onto the CLI exit codes: invalid-argument
/// and domain errors are validation failures (exit 2), numeric and
/// consistency failures are exit 3, unsupported cases exit 4 and property
/// violations exit 1.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A precondition on the arguments was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// The requested point lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A numeric computation failed (non-finite intermediate, no convergence).
    #[error("numeric failure: {0}")]
    Numeric(String),
    /// Internal cross-check failed (e.g. Laurent-to-polynomial cancellation).
    #[error("internal consistency: {0}")]
    Consistency(String),
    /// The case is real but deliberately not implemented by default.
    #[error("unsupported case: {0}")]
    Unsupported(String),
    /// A mathematical property that must hold was violated by the data.
    #[error("property violation: {0}")]
    PropertyViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
