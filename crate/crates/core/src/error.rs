use std::path::PathBuf;

use thiserror::Error;

use crate::grid::Geometry;

/// Errors produced by the solver, diagnostics and I/O layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid bump: {0}")]
    InvalidBump(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("support of term {term} comes within the {margin} stencil halo of the boundary")]
    SupportTouchesBoundary { term: usize, margin: f64 },
    #[error("operation requires {expected:?} geometry, got {actual:?}")]
    GeometryMismatch { expected: Geometry, actual: Geometry },
    #[error("non-finite value at node {index}")]
    NonFinite { index: usize },
    #[error("initial data is not radially symmetric about the cube center: {0}")]
    NotRadial(String),
    #[error("incompatible runs: {0}")]
    IncompatibleRuns(String),
    #[error("extent mismatch: expected {expected} nodes, got {actual}")]
    ExtentMismatch { expected: usize, actual: usize },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("config validation error at `{key}`{}: {message}", location_suffix(.location))]
    Validation {
        key: String,
        /// 1-based line and column of the key in the config text, when it appears there.
        location: Option<(usize, usize)>,
        message: String,
    },
    #[error("corrupt checkpoint ({field}): {message}")]
    CorruptCheckpoint { field: &'static str, message: String },
    #[error("checkpoint precision {found} does not match requested {expected}")]
    PrecisionMismatch { expected: &'static str, found: &'static str },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

fn location_suffix(location: &Option<(usize, usize)>) -> String {
    match location {
        Some((line, col)) => format!(" (line {line}, column {col})"),
        None => String::new(),
    }
}
