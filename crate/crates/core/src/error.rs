use std::path::PathBuf;

/// Errors raised by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("budget exceeded: {what} (suggestion: {suggestion})")]
    Budget { what: String, suggestion: String },

    #[error("arithmetic overflow computing {0}")]
    Overflow(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("grid mismatch: levels {left:?} vs {right:?}")]
    GridMismatch { left: Vec<u32>, right: Vec<u32> },

    #[error("function is not constant on grid cell {cell}")]
    NotPiecewiseConstant { cell: usize },

    #[error("line {line}: cannot parse {token:?} as a coordinate")]
    Parse { line: usize, token: String },

    #[error("line {line}: expected {expected} coordinates, found {found}")]
    InconsistentDimension {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}: coordinate {value} outside [0, 1)")]
    OutOfRange { line: usize, value: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn budget(what: impl Into<String>, suggestion: impl Into<String>) -> Self {
        Error::Budget {
            what: what.into(),
            suggestion: suggestion.into(),
        }
    }
}
