use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not symmetric at ({row}, {col}): {a} vs {b}")]
    NotSymmetric { row: usize, col: usize, a: f64, b: f64 },

    #[error("graph too small: need at least {min} vertices, got {n}")]
    TooSmall { n: usize, min: usize },

    #[error("cover block {block} has {size} vertices; at least {min} are required")]
    BlockTooSmall { block: usize, size: usize, min: usize },

    #[error("invalid cover: {0}")]
    InvalidCover(String),

    #[error("super-graph is disconnected")]
    Disconnected,

    #[error("blocks do not overlap: {0}")]
    EmptyIntersection(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
