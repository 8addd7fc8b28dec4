use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("catalog validation failed for pattern {pattern}: {reason}")]
    Catalog { pattern: String, reason: String },

    #[error("layout {name}: {reason}")]
    Layout { name: String, reason: String },

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("calibration did not converge: {0}")]
    Calibration(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
