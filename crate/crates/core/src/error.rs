use thiserror::Error;

/// Errors raised by the divergence, generator, harness and index routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DivergenceError {
    #[error("distribution needs at least 2 entries, got {len}")]
    TooShort { len: usize },

    #[error("entry {index} has non-positive mass {value}")]
    ZeroOrNegativeMass { index: usize, value: f64 },

    #[error("entry {index} is not a finite number")]
    NonFinite { index: usize },

    #[error("masses sum to {sum}, which is more than 1e-6 away from 1 (pass a renormalize flag to rescale)")]
    NotNormalizable { sum: f64 },

    #[error("smoothing must be a finite positive number, got {0}")]
    InvalidSmoothing(f64),

    #[error("inputs must be strictly positive, got p = {p}, q = {q}")]
    NonPositiveInput { p: f64, q: f64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("direction is degenerate: P0 equals Q")]
    DegenerateDirection,

    #[error("cannot build an index from an empty point set")]
    EmptyInput,
}

pub type Result<T> = std::result::Result<T, DivergenceError>;
