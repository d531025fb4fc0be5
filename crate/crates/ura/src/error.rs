use thiserror::Error;

#[derive(Debug, Error)]
pub enum UraError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("singular Gram matrix (condition estimate {cond:.3e})")]
    SingularGram { cond: f64 },
    #[error("config validation failed: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, UraError>;
