//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("dictionary atom {index} is degenerate (norm {norm:.3e})")]
    DegenerateAtom { index: usize, norm: f64 },

    #[error("no usable atom: every dictionary column vanishes under the row mask")]
    NoUsableAtom,

    #[error("invalid stop rule: at least one of max_sparsity / residual_tol must be set")]
    InvalidStopRule,

    #[error("dictionary layout mismatch: expected {expected}, got {actual}")]
    Layout { expected: String, actual: String },

    #[error("empty training set")]
    EmptyTrainingSet,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("sparse coding failed on column {column}: {source}")]
    Coding {
        column: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("corpus ingestion failed for pair ({target}, {guidance}): {message}")]
    Ingest {
        target: PathBuf,
        guidance: PathBuf,
        message: String,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by numerical breakdown rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DegenerateAtom { .. } | Error::NoUsableAtom | Error::Numerical(_)
        ) || matches!(self, Error::Coding { source, .. } if source.is_numerical())
    }
}
