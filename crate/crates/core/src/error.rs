use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the domain of the operation (e.g. time outside the schedule).
    #[error("domain error: {0}")]
    Domain(String),
    /// Malformed or insufficient input data.
    #[error("input error: {0}")]
    Input(String),
    /// Invalid configuration value.
    #[error("configuration error: {0}")]
    Config(String),
    /// Non-recoverable numerical failure (singular matrix, non-positive inertia).
    #[error("numeric error: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
