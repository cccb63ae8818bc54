//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by state construction, dynamics and thermodynamics.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A matrix that must be Hermitian is not, within tolerance.
    #[error("matrix is not Hermitian: max asymmetry {max_asymmetry:.3e}")]
    NotHermitian { max_asymmetry: f64 },

    /// A matrix has the wrong dimension for the requested operation.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// An input value is outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A value failed a structural validation check.
    #[error("validation error: {0}")]
    Validation(String),

    /// An operation was called with an inconsistent setup tag.
    #[error("usage error: {0}")]
    Usage(String),

    /// Inconsistent or unusable run configuration.
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
