use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An input violates a mathematical precondition.
    #[error("domain error: {0}")]
    Domain(String),
    /// Operand shapes do not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// A search or enumeration would exceed the configured budget.
    #[error("resource limit: {0}")]
    Resource(String),
    /// A self-check on a computed result failed. Indicates a bug or a
    /// fabricated input that should have been rejected earlier.
    #[error("consistency failure: {0}")]
    Consistency(String),
    /// Scenario or report data could not be decoded.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn shape<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Shape(msg.into()))
}

pub(crate) fn consistency<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Consistency(msg.into()))
}
