use thiserror::Error;

#[derive(Debug, Error)]
pub enum AppError {
    /// Bad or missing configuration; maps to exit code 2.
    #[error("config error: {0}")]
    Config(String),
    #[error("malformed input: {0}")]
    Format(String),
    #[error(transparent)]
    Core(#[from] toepspec_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type AppResult<T> = std::result::Result<T, AppError>;

impl AppError {
    pub fn config(msg: impl Into<String>) -> Self {
        AppError::Config(msg.into())
    }

    pub fn is_config(&self) -> bool {
        matches!(self, AppError::Config(_))
    }
}
