use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("training diverged during {stage}: non-finite value")]
    Divergence { stage: String },

    #[error("encoding error: {0}")]
    Encoding(String),

    #[error("ingestion error at row {row}, column {column:?}: {message}")]
    Ingestion {
        row: usize,
        column: Option<String>,
        message: String,
    },

    #[error("no columns left after dropping sparse columns")]
    EmptySchema,

    #[error("column {0:?} has no non-missing values")]
    DegenerateColumn(String),

    #[error("need at least 3 rows to split, got {0}")]
    TooFewRows(usize),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("histograms are not comparable: {0}")]
    Comparability(String),

    #[error("value outside the valid domain: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("model file format error: {0}")]
    Format(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn diverged(stage: impl Into<String>) -> Self {
        Error::Divergence {
            stage: stage.into(),
        }
    }
}
