use std::path::PathBuf;

use thiserror::Error;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BREAKDOWN: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("input is not positive definite: {0}")]
    NotSpd(String),

    #[error(transparent)]
    Core(#[from] toepstab::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{}:{line}: {msg}", path.display())]
    Format {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("writing output: {0}")]
    Output(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::NotSpd(_) => EXIT_BREAKDOWN,
            CliError::Core(e) => match e {
                toepstab::Error::Breakdown { .. }
                | toepstab::Error::NotPositiveDefinite { .. }
                | toepstab::Error::ZeroPivot { .. }
                | toepstab::Error::IllConditioned => EXIT_BREAKDOWN,
                // bad parameters from the command line or a malformed matrix
                _ => EXIT_USAGE,
            },
            CliError::Io { .. } | CliError::Format { .. } | CliError::Output(_) => EXIT_IO,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
