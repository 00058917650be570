use thiserror::Error;

/// Errors raised by the symbolic, exact and numeric engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("not representable: {0}")]
    NotRepresentable(String),
    #[error("jet undefined: {0}")]
    JetUndefined(String),
    #[error("inadmissible alpha: {0}")]
    Inadmissible(String),
    #[error("kernel class violation at ({i},{j}): {reason}")]
    KernelClass { i: usize, j: usize, reason: String },
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("operator is not nilpotent")]
    NotNilpotent,
    #[error("size cap exceeded: {0}")]
    SizeCap(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
