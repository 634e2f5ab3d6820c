use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A value outside the domain of the operation (grid bounds, angles, node counts).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// The factorization produced a zero or non-finite pivot.
    #[error("matrix is singular to working precision (pivot {pivot}, condition estimate {condition:e})")]
    Singular { pivot: usize, condition: f64 },

    /// A metric or residual whose normalisation vanishes.
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
