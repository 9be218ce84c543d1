use thiserror::Error;

/// Errors raised by the Bethe-ansatz toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A coefficient hit a pole, or the momenta violate the regularity
    /// assumptions of the ansatz.
    #[error("singular momentum configuration: {0}")]
    Singular(String),

    #[error("size guard exceeded: {0}")]
    TooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

pub(crate) fn invalid_dim<T>(expected: usize, got: usize) -> Result<T> {
    Err(Error::DimensionMismatch { expected, got })
}
