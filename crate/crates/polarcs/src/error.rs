//! Crate-wide error type.

use thiserror::Error;

/// Errors reported by construction and decoding routines.
///
/// Decode outcomes that are expected in normal operation (an erasure pattern
/// that cannot be resolved, an iteration cap that was hit) are *not* errors;
/// they are reported through
/// [`DecodeStatus`](crate::decode::DecodeStatus). `Error` is reserved for
/// misuse: out-of-range parameters, shape mismatches, and inputs that are
/// degenerate for the requested operation.
#[derive(Debug, Error)]
pub enum Error {
    /// A scalar parameter is outside its documented domain.
    #[error("invalid parameter {name}: {message}")]
    InvalidParameter {
        name: &'static str,
        message: String,
    },

    /// Two arguments that must agree in shape do not.
    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// A size exceeds the configured safety cap for dense or recursive work.
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    /// The input is numerically degenerate (e.g. rank-deficient) for the
    /// requested operation.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// File or serialization problem in the I/O helpers.
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
