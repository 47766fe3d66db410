use std::io;

use thiserror::Error;

/// Errors produced anywhere in the detection chain.
#[derive(Debug, Error)]
pub enum Error {
    /// A matrix had an unusable shape.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// Input data violated a value precondition (non-finite, negative power, ...).
    #[error("input error: {0}")]
    Input(String),

    /// A rectangle query fell outside the table or was inverted.
    #[error("bounds error: {0}")]
    Bounds(String),

    /// A scalar parameter was outside its domain.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// A combination of settings cannot be applied to the given data.
    #[error("configuration error: {0}")]
    Config(String),

    /// A file did not match its expected layout.
    #[error("format error: {0}")]
    Format(String),

    /// A config file line failed to parse.
    #[error("line {line}: {message}")]
    ConfigLine { line: usize, message: String },

    /// The two CFAR backends disagreed outside the tie band.
    #[error("backend mismatch at cell ({row}, {col}): naive={naive} integral={integral}")]
    BackendMismatch {
        row: usize,
        col: usize,
        naive: bool,
        integral: bool,
    },

    /// A pipeline stage failed.
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Strips any stage wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
