use thiserror::Error;

/// Errors produced by the sparse PCA toolkit.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not symmetric: |M[{row}][{col}] - M[{col}][{row}]| = {diff:e}")]
    Asymmetric { row: usize, col: usize, diff: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {dim} exceeds the dense eigensolver cap {cap}")]
    DenseCapExceeded { dim: usize, cap: usize },

    #[error(
        "eigensolver did not converge after {iterations} iterations (best residual {residual:e})"
    )]
    NoConvergence {
        iterations: usize,
        residual: f64,
        /// Best Ritz value seen before giving up.
        value: f64,
    },

    #[error("matrix is not positive semidefinite (minimum eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("index set is not strictly increasing at index {index}")]
    UnsortedOrDuplicateIndex { index: usize },

    #[error("index set is empty")]
    EmptyIndexSet,

    #[error("trace of A must be positive, got {0}")]
    NonPositiveTrace(f64),

    #[error("diagonal of W is identically zero")]
    ZeroDiagonal,

    #[error("trace of W is {trace}, expected 1")]
    TraceViolation { trace: f64 },

    #[error("brute force would enumerate {count} supports, above the guard {limit}")]
    GuardExceeded { count: u128, limit: u128 },

    #[error("eigengap is zero (lambda_l = lambda_l+1 = {value})")]
    ZeroEigengap { value: f64 },

    #[error("rank-one window condition violated: {0}")]
    WindowViolated(String),

    #[error("constructed certificate failed verification: {0}")]
    CertificateRejected(String),

    #[error("bisection failed to bracket a root: {0}")]
    Bracketing(String),

    #[error("linear minimization oracle failed at iteration {iteration} (objective so far {objective}): {source}")]
    Lmo {
        iteration: usize,
        objective: f64,
        source: Box<Error>,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
