use thiserror::Error;

/// Errors produced by graph construction, filterbank design and sampling.
#[derive(Error, Debug)]
pub enum GfriError {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("filterbank not invertible: {0}")]
    NotInvertible(String),

    #[error("Bezout condition violated: {0}")]
    Bezout(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, GfriError>;
