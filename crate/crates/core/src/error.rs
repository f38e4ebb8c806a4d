use thiserror::Error;

#[derive(Debug, Error)]
pub enum SkError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("singular kernel: rho_j(0) = {value:e} is not above tolerance for j = {index:?}")]
    SingularKernel { index: Vec<i64>, value: f64 },

    #[error("numerically singular interpolation system (pivot ratio {pivot_ratio:e})")]
    NumericalRank { pivot_ratio: f64 },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SkError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(SkError::InvalidArgument(msg.into()))
}
