use thiserror::Error;

/// Errors raised by construction and verification routines.
#[derive(Debug, Error)]
pub enum FhcError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A structural invariant of the construction failed. Never expected.
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),

    #[error("resource budget exhausted: {0}")]
    ResourceExhausted(String),

    /// Requested accuracy was not reached; `achieved` is the best certified bound.
    #[error("precision budget insufficient: wanted {wanted:e}, achieved {achieved:e}")]
    Precision { wanted: f64, achieved: f64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, FhcError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(FhcError::InvalidArgument(msg.into()))
}
