use thiserror::Error;

/// Errors raised by the paving toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("radicand mismatch: {left} vs {right}")]
    RadicandMismatch { left: String, right: String },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("matrix is not symmetric (asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("frame is not orthonormal (Gram defect {defect:e})")]
    NotOrthonormal { defect: f64 },
    #[error("eigensolver did not converge after {iterations} iterations (last estimate {last_estimate})")]
    NoConvergence { iterations: usize, last_estimate: f64 },
    #[error("dimension {n} exceeds the brute-force cap {cap} (raise --max-n)")]
    CapExceeded { n: usize, cap: usize },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("numerical inconsistency: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
