use thiserror::Error;

/// Errors raised by game construction, equilibrium checks, learners and the
/// experiment harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("history is empty")]
    EmptyHistory,

    #[error("capacity exceeded: {profiles} profiles (limit {limit})")]
    Capacity { profiles: usize, limit: usize },

    #[error("not found: {0}")]
    NotFound(String),

    #[error("learner state is not initialized: {0}")]
    Uninitialized(String),

    /// A learner received (or was configured with) feedback it is not
    /// entitled to under its observation model.
    #[error("information model violation: {0}")]
    InformationModel(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("serialization error: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
