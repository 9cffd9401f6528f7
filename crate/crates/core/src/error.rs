use thiserror::Error;

/// Failures are split by cause so callers can tell a violated hypothesis from
/// a computation that did not converge.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("point {x} lies outside [{a}, {b}]")]
    OutsideInterval { x: f64, a: f64, b: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
