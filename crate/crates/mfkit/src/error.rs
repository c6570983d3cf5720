//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("ring mismatch: {0}")]
    RingMismatch(String),

    #[error("variable name collision: {0} (rename one side before tensoring)")]
    VariableCollision(String),

    #[error("factorization identity fails at ({row},{col})")]
    NotAFactorization { row: usize, col: usize },

    #[error("superpotential mismatch: {0}")]
    SuperpotentialMismatch(String),

    #[error("{0}")]
    Invalid(String),

    #[error("dimension sequence inconsistent with a beta-module: {0} (raise D_max)")]
    BetaFit(String),

    #[error("result not stabilized at the given bounds: {0}")]
    Unstabilized(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
