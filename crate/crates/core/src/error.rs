use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DaisError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    /// Cholesky factorization failed at the given leading minor (0-based).
    #[error("Cholesky factorization failed: leading minor {minor} is not positive")]
    CholeskyFailure { minor: usize },

    #[error("non-finite density or gradient at sample {index}")]
    NonFiniteDensity { index: usize },

    #[error("target does not provide a Hessian")]
    HessianUnavailable,

    #[error(
        "Newton iteration did not converge in {iterations} iterations (|grad|_inf = {grad_norm:e})"
    )]
    NoConvergence { iterations: usize, grad_norm: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// `row` and `column` are 1-based positions in the file.
    #[error("parse error at line {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("invalid label {value} at line {row}; expected one of 0, 1, -1, +1")]
    Label { row: usize, value: f64 },

    #[error("ragged rows: line {row} has {found} columns, expected {expected}")]
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for DaisError {
    fn from(err: std::io::Error) -> Self {
        DaisError::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, DaisError>;
