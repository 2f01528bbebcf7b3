use thiserror::Error;

use crate::ringcore::RingContext;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("ring context mismatch: {0} vs {1}")]
    ContextMismatch(RingContext, RingContext),

    /// `x^(p^(i-1) T) - 1` was not divisible by `p^i`; the polynomial is not primitive.
    #[error("certificate corruption: {0}")]
    CertificateCorruption(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
