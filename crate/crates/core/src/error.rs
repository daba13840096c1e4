use thiserror::Error;

#[derive(Debug, Error)]
pub enum NevError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("gaps cover more than the whole circle")]
    EmptySet,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("contour error: {0}")]
    Contour(String),
    #[error("integration error: {0}")]
    Integration(String),
    #[error("unknown registry id `{0}`")]
    UnknownId(String),
    #[error("scenario rejected: {0}")]
    Rejected(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, NevError>;
