use thiserror::Error;

/// Errors raised by the numerical routines and the sweep runner.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("numerical PSD violation: eigenvalue {0:e} below clip tolerance")]
    PsdViolation(f64),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("qubit index {index} out of range 1..={n_qubits}")]
    QubitIndex { index: usize, n_qubits: usize },

    #[error("size cap exceeded: {what} = {value}, maximum {max}")]
    SizeCap {
        what: &'static str,
        value: usize,
        max: usize,
    },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
