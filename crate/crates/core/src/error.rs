use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration (bad parameters, unknown preset, size caps).
    #[error("configuration error: {0}")]
    Config(String),
    /// An action, response or parameter lies outside its declared domain.
    #[error("domain violation: {0}")]
    Domain(String),
    /// Numerical breakdown (non-finite values, singular systems).
    #[error("numeric error: {0}")]
    Numeric(String),
    /// Runtime failure of an episode or experiment.
    #[error("runtime error: {0}")]
    Runtime(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
