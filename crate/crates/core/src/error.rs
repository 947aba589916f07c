use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("record {index}: entity id ({trustor}, {trustee}) out of range for dimension {m}")]
    IdOutOfRange {
        index: usize,
        trustor: usize,
        trustee: usize,
        m: usize,
    },

    #[error("record {index}: trust value {value} outside [0, 1]")]
    ValueOutOfRange { index: usize, value: f64 },

    #[error("entity {id} out of range for dimension {m}")]
    EntityOutOfRange { id: usize, m: usize },

    #[error("shape mismatch: {left} vs {right}")]
    ShapeMismatch { left: usize, right: usize },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("row {row} has no entries; inject self-confidence before normalizing")]
    EmptyRow { row: usize },

    #[error("target sparsity degree {target} exceeds current degree {current}")]
    InfeasibleTarget { target: f64, current: f64 },

    #[error("duplicate (trustor, trustee) key ({0}, {1})")]
    DuplicateKey(usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}:{line}: {message}")]
    Line {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{0}: no trust records")]
    EmptyDataset(PathBuf),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
