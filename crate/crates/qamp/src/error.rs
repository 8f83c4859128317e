use thiserror::Error;

/// Errors produced by construction, decomposition, synthesis, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular operator: {0}")]
    Singular(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("not symplectic: residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    NotSymplectic { residual: f64, tolerance: f64 },

    #[error("decomposition failed: {0}")]
    Decomposition(String),

    #[error("synthesis failed during {stage}: {reason}")]
    Synthesis { stage: String, reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
