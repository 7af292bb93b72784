//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("arity mismatch: degree-{degree} covector applied to {got} vectors")]
    ArityMismatch { degree: usize, got: usize },

    #[error("invalid degree: {0}")]
    InvalidDegree(String),

    #[error("parity mismatch: {0}")]
    ParityMismatch(String),

    #[error("unsupported dimension {dim} for {op}")]
    UnsupportedDimension { op: &'static str, dim: usize },

    #[error("missing outer frame on a simplex (outer-oriented integration requires one)")]
    MissingOuterFrame,

    #[error("singular map: |det| = {det:e} below threshold")]
    SingularMap { det: f64 },

    #[error("precondition violated: {what} (residual {residual:e})")]
    Precondition { what: String, residual: f64 },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
