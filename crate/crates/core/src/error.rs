use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the validation library and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument or configuration value violates an operation's precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A line of a key-value configuration file could not be understood.
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    /// A failure inside one (N, T) cell of an experiment grid.
    #[error("cell N={n}, T={trials}: {source}")]
    Cell {
        n: usize,
        trials: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
