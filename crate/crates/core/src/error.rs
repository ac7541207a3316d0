use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square or has the wrong dimension: {0}")]
    Dimension(String),

    #[error("determinant {det} is not 1 (relative deviation {deviation:e})")]
    InvalidDeterminant { det: f64, deviation: f64 },

    #[error("numerically singular input: diagonal factor {value:e} at index {index}")]
    NumericalRank { index: usize, value: f64 },

    #[error("element is not regular: smallest log-eigenvalue gap {gap:e} <= {tol:e}")]
    NotRegular { gap: f64, tol: f64 },

    #[error("spectrum is not real: eigenvalue with imaginary part {imag:e}")]
    ComplexSpectrum { imag: f64 },

    #[error("spectrum is not positive: eigenvalue {value:e}")]
    NonPositiveSpectrum { value: f64 },

    #[error("not a subgroup: {0}")]
    NotASubgroup(String),

    #[error("no convergence after {steps} steps")]
    NoConvergence { steps: usize },

    #[error("unsupported space: {0}")]
    UnsupportedSpace(String),

    #[error("no regular-positive word of length <= {depth} among the generators")]
    NoRegularElement { depth: usize },

    #[error("control sets {a} and {b} reach each other; epsilon is too large")]
    Cycle { a: usize, b: usize },

    #[error("factorization failed: {0}")]
    Factorization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
