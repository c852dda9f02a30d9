use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("transition row (h={stage}, s={state}, a={action}) sums to {sum}, not 1")]
    DegenerateRow {
        stage: usize,
        state: usize,
        action: usize,
        sum: f64,
    },

    #[error("reward {value} at (h={stage}, s={state}, a={action}) is outside [0, 1]")]
    RewardOutOfRange {
        stage: usize,
        state: usize,
        action: usize,
        value: f64,
    },

    #[error("gram matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("regression weight sigma_bar={value} is below the floor {floor}")]
    SigmaBelowFloor { value: f64, floor: f64 },

    #[error("unknown agent variant `{0}`")]
    UnknownVariant(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl Error {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.to_string(),
        }
    }
}
