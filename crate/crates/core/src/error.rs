use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid tile code {0}")]
    InvalidTile(u8),

    #[error("unknown character {ch:?} at row {row}, col {col}")]
    UnknownChar { ch: char, row: usize, col: usize },

    #[error("format error: {0}")]
    Format(String),

    #[error("annotation error: {0}")]
    Annotation(String),

    #[error("extraction error: {0}")]
    Extraction(String),

    #[error("weight validation error in layer {layer}: {reason}")]
    WeightValidation { layer: usize, reason: String },

    #[error("incompatible weights: {0}")]
    Incompatible(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable category, used for CLI exit lines.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidTile(_) | Error::UnknownChar { .. } | Error::Format(_) => "parse",
            Error::Annotation(_) => "annotation",
            Error::Extraction(_) => "extraction",
            Error::WeightValidation { .. } | Error::Incompatible(_) => "weights",
            Error::Config(_) => "config",
            Error::Contract(_) => "contract",
            Error::Io { .. } => "io",
            Error::Json { .. } => "json",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
