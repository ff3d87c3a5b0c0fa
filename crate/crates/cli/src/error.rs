use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

/// Malformed PGM data, located by byte offset.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("byte {offset}: {msg}")]
pub struct PgmError {
    pub offset: usize,
    pub msg: String,
}

impl PgmError {
    pub(crate) fn new(offset: usize, msg: impl Into<String>) -> Self {
        Self {
            offset,
            msg: msg.into(),
        }
    }
}

/// Malformed pulse CSV, located by 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {msg}")]
pub struct CsvError {
    pub line: u64,
    pub msg: String,
}

impl CsvError {
    pub(crate) fn new(line: u64, msg: impl Into<String>) -> Self {
        Self {
            line,
            msg: msg.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Pgm { path: PathBuf, source: PgmError },

    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: CsvError },

    #[error("config: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("metric {0:?} is not finite")]
    NonFiniteMetric(String),

    #[error(transparent)]
    Core(#[from] rcnn_core::Error),
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for numeric or fit failures, 1 for everything caused by the input.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numeric() => 2,
            CliError::NonFiniteMetric(_) => 2,
            _ => 1,
        }
    }
}
