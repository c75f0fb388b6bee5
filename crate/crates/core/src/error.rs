use thiserror::Error;

/// Errors reported by table builders, evaluators and verification suites.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("requested size {requested} exceeds the capacity cap {cap}")]
    Capacity { requested: u64, cap: u64 },

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integer overflow while computing coefficient n = {n}")]
    Overflow { n: usize },

    #[error("pole: {0}")]
    Pole(String),

    #[error("quadrature did not converge: achieved error {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("contour truncation insufficient; suggested t_max = {suggested_t_max}")]
    Truncation { suggested_t_max: f64 },

    #[error("table too small: need n up to {needed}, have {available}")]
    InsufficientTable { needed: u64, available: u64 },

    #[error("cache file: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;
