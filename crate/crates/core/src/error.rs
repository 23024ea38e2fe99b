use thiserror::Error;

/// Errors produced by the density, kernel and simulation layers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument lies outside the documented domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two points that must share a dimension do not.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A requested iterated-integral order exceeds the supported range.
    #[error("iterated order {requested} exceeds supported maximum {max}")]
    Order { requested: i64, max: i64 },

    /// A numerical procedure produced an inconsistent result
    /// (e.g. a density evaluating to a significantly negative value).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Adaptive quadrature failed to reach the requested tolerance.
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    /// Configuration rejected by validation.
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn dimension(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}
