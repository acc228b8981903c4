use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("channel is not trace preserving (residual {0:e})")]
    NotTracePreserving(f64),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("unsupported Schatten index: {0}")]
    UnsupportedNorm(String),

    #[error("numerical failure in {what} (residual {residual:e})")]
    NumericalFailure { what: String, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn numerical(what: impl Into<String>, residual: f64) -> Self {
        Error::NumericalFailure {
            what: what.into(),
            residual,
        }
    }
}
