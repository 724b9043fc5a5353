use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller violated an operation's contract (shape mismatch, foreign algebra, ...).
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("invalid algebra description: {0}")]
    Schema(String),
    #[error("unsupported algebra: {0}")]
    UnsupportedAlgebra(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("incomplete catalog: {0}")]
    IncompleteCatalog(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("size cap exceeded: {0}")]
    CapExceeded(String),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    /// A checked mathematical statement failed; always an implementation bug.
    #[error("falsified: {0}")]
    Falsification(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
