use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("sentence is empty after preprocessing: {0:?}")]
    DegenerateSentence(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("schema error on line {line}: {message}")]
    Schema { line: usize, message: String },

    #[error("invalid input: {0}")]
    Invariant(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("zero-norm vector has no direction")]
    ZeroVector,

    #[error("relation count is zero for {relation} at node {node}")]
    Degree { node: String, relation: String },

    #[error("correlation is undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("record {0} has no human score")]
    MissingLabel(String),

    #[error("invalid model: {0}")]
    Model(String),

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
