use thiserror::Error;

/// Errors raised by the numerical pipelines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter is out of its admissible range.
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// Input data is not usable (non-finite entries, wrong shapes).
    #[error("invalid data: {0}")]
    Data(String),
    /// A matrix is too ill-conditioned for the requested factorization.
    #[error("ill-conditioned: {0}")]
    Conditioning(String),
    /// A user-supplied object fails a structural test (rank, standardness).
    #[error("validation failed: {0}")]
    Validation(String),
    /// The modular operator has spectrum at 1, so the cutting formula is undefined.
    #[error("degenerate modular spectrum: {0}")]
    DegenerateSpectrum(String),
    /// The parameter combination is outside what is implemented.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
