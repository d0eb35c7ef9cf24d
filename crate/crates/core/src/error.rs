use thiserror::Error;

/// Errors produced by the library.
///
/// Variants are coarse on purpose: callers dispatch on the kind (bad input,
/// blown budget, broken precondition), while the message carries the
/// offending quantity.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Coordinate dimensions disagree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A mathematical precondition of the operation does not hold for the
    /// given data (e.g. a net coarser than the lemma requires).
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    /// The requested computation exceeds a configured size budget.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::PreconditionViolation(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        Error::ResourceLimit(msg.into())
    }
}
