use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by code construction, decoding and the simulation harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("block length {0} is not a power of two")]
    BlockLength(usize),
    #[error("information bit count {k} out of range for block length {n}")]
    InfoCount { k: usize, n: usize },
    #[error("invalid information set: {0}")]
    InfoSet(String),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("correction factor {0} outside [-0.5, 0.5]")]
    BetaOutOfRange(f64),
    #[error("list size {0} is not a power of two")]
    ListSize(usize),
    #[error("iteration cap must be at least 1")]
    IterationCap,
    #[error("invalid action set: {0}")]
    ActionSet(String),
    #[error("q-table has {found} actions, action set has {expected}")]
    TableShape { expected: usize, found: usize },
    #[error("malformed q-table at line {line}: {msg}")]
    TableFormat { line: usize, msg: String },
    #[error("malformed file at line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
