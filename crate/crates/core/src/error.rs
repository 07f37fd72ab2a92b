use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("resonant lattice: K^T p vanishes for nonzero p = {0:?}")]
    Resonant(Vec<i64>),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("singular system: {0}")]
    Singular(String),

    #[error("pole of the rational approximant at epsilon = {0}")]
    Pole(f64),

    #[error("relative error undefined: the exact field vanishes")]
    UndefinedMetric,
}

pub type Result<T> = std::result::Result<T, Error>;
