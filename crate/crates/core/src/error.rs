use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is singular or near-singular (condition estimate {condition:e})")]
    Singular { condition: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),

    #[error("problem generation failed: {0}; retry with a different seed")]
    Generation(String),

    #[error("failed to parse {path}: {message} (line {line}, column {column})")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("invalid solver configuration: {0}")]
    Config(String),

    #[error("insufficient data: {usable} usable records, at least {required} required")]
    InsufficientData { usable: usize, required: usize },

    #[error("usage: {0}")]
    Usage(String),

    #[error("numerical routine failed: {0}")]
    Numerical(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("i/o error on {path}: {source}")]
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
