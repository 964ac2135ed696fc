use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported domain: {0}")]
    UnsupportedDomain(String),
    #[error("no sharp limit constant for {0}")]
    NoSharpConstant(String),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("budget refused: estimated {estimated:.3e} distance evaluations exceeds {limit:.1e}")]
    BudgetRefused { estimated: f64, limit: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
