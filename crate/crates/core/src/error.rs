use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("jet shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("degree error: {0}")]
    Degree(String),
    #[error("element is not nilpotent within {0} powers")]
    NotNilpotent(usize),
    #[error("series of length {have} is shorter than the nilpotency order {need}")]
    InsufficientOrder { have: usize, need: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
