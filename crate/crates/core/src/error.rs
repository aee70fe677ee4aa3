use thiserror::Error;

/// Errors raised by the library.
///
/// A violated quantization condition is reported through [`Error::Quantization`];
/// callers that treat it as a verdict rather than a failure should match on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("index {index} outside the declared range of the family")]
    IndexOutOfRange { index: i64 },

    #[error("quantization condition violated: t*s = {product} lies within {eps:e} of pi*Z")]
    Quantization { product: f64, eps: f64 },

    #[error("series not summable under its envelope: {0}")]
    NotSummable(String),

    #[error("cannot certify divergence: {0}")]
    NotDivergent(String),

    #[error("envelope check failed: {0}")]
    Envelope(String),

    #[error("norm is infinite or unavailable: {0}")]
    InfiniteNorm(String),

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
