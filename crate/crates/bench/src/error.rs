use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Core(#[from] spca::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("Chan baseline objective must be positive, got {0}")]
    NonPositiveBaseline(f64),

    #[error("malformed report: {0}")]
    Report(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, BenchError>;

pub(crate) fn parse_err(line: usize, message: impl Into<String>) -> BenchError {
    BenchError::Parse {
        line,
        message: message.into(),
    }
}
