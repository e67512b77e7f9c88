use thiserror::Error;

/// Errors produced by the library and CLI.
#[derive(Debug, Error)]
pub enum TfError {
    #[error("divisibility failure: {divisor} does not divide {dividend} (relation {relation})")]
    Divisibility {
        dividend: usize,
        divisor: usize,
        relation: &'static str,
    },

    #[error("{element} is not an element of the lattice {lattice}")]
    LatticeMembership { element: usize, lattice: &'static str },

    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian: |a({i},{j}) - conj(a({j},{i}))| = {deviation:e}")]
    NotHermitian { i: usize, j: usize, deviation: f64 },

    #[error("n must satisfy 1 <= n <= m (n = {n}, m = {m})")]
    InvalidRank { n: usize, m: usize },

    #[error("signals carry different group configurations")]
    ConfigMismatch,

    #[error("power iteration did not converge after {iterations} iterations")]
    ConvergenceFailure { iterations: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("length mismatch: header declares {expected} sample rows, found {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, TfError>;
