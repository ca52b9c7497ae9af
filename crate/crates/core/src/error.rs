use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown token `{0}`")]
    UnknownToken(String),

    #[error("unknown category `{0}`")]
    UnknownCategory(String),

    #[error("taxonomy row {row}: {reason}")]
    TaxonomyLoad { row: usize, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid scene pair: {0}")]
    InvalidPair(String),

    #[error("{path}: line {line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input rather than a runtime failure.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::UnknownToken(_) | Error::UnknownCategory(_)
        )
    }
}
