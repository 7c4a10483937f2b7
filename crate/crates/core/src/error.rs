use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("evaluation budget exceeded: {used} > {budget}")]
    Budget { used: u64, budget: u64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("enumeration of {states} states exceeds the limit of {limit}")]
    Size { states: u128, limit: u128 },

    #[error("parse error in block `{block}` at line {line}: {message}")]
    Parse {
        block: String,
        line: usize,
        message: String,
    },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("data error: {0}")]
    Data(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
