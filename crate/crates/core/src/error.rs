use std::io;

use thiserror::Error;

/// Errors raised by the lattice, kernel, energy and solver layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("field lives on a different box (radius {found} vs {expected})")]
    BoxMismatch { expected: usize, found: usize },

    #[error("kernel table radius {have} does not cover displacements up to {need}")]
    KernelTooSmall { have: usize, need: usize },

    #[error("quadrature did not converge: {what} (estimated error {estimate:e} > {tolerance:e})")]
    QuadratureNotConverged {
        what: String,
        estimate: f64,
        tolerance: f64,
    },

    #[error("linear solve did not converge: relative residual {residual:e} after {iterations} iterations")]
    LinearSolveFailed { residual: f64, iterations: usize },

    #[error("degenerate direction: {0}")]
    Degenerate(String),

    #[error("line search exhausted at iteration {iteration}: {detail}")]
    LineSearchFailed { iteration: usize, detail: String },

    #[error("malformed file: {0}")]
    Format(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
