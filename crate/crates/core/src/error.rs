use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("hyperedge {edge} is empty")]
    EmptyHyperedge { edge: usize },

    #[error("hyperedge {edge} references node {node} but the hypergraph has {num_nodes} nodes")]
    NodeOutOfRange {
        edge: usize,
        node: u64,
        num_nodes: usize,
    },

    #[error("hyperedge {edge} lists node {node} more than once")]
    DuplicateNode { edge: usize, node: u64 },

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error("infeasible generator spec: {0}")]
    Infeasible(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no 2-simplices available to carry lambda2 = {lambda2}")]
    NoTwoSimplices { lambda2: f64 },

    #[error("unknown seed-selection method `{0}`")]
    UnknownMethod(String),

    #[error("requested {k} seeds from {available} eligible nodes")]
    TooManySeeds { k: usize, available: usize },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("simplex stream length mismatch: nverts sums to {expected} labels, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Write(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
