use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported size {size}: exhaustive search is limited to {max}")]
    UnsupportedSize { size: usize, max: usize },

    #[error("value {value} at index {index} has no preimage on any monotone piece")]
    NoPreimage { index: usize, value: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("displacement graph has no path from {from} to {to}")]
    LemmaViolation { from: usize, to: usize },

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
