//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Incompatible matrix shapes for an operation.
    #[error("shape mismatch in {op}: {detail}")]
    Shape { op: &'static str, detail: String },

    /// NaN or infinity where a finite value is required.
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// Argument outside its documented domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative routine hit its iteration cap before reaching tolerance.
    #[error("{op} did not converge within {iterations} iterations")]
    NonConvergence { op: &'static str, iterations: usize },

    /// Configuration parse or validation failure.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
