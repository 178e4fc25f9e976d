use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix must be square and non-empty, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian: |A - A^dag|_F = {deviation:e} exceeds {bound:e}")]
    NonHermitianInput { deviation: f64, bound: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("not an orthogonal projector: {0}")]
    NotProjector(String),

    #[error("invalid density state: {0}")]
    InvalidState(String),

    #[error("{0} is not a spectral point of the observable")]
    UnknownSpectralPoint(f64),

    #[error("function domain does not match the spectrum: {0}")]
    DomainMismatch(String),

    #[error("measurement basis does not match the observable: {0}")]
    BasisMismatch(String),

    #[error("invalid measurement event: {0}")]
    InvalidEvent(String),

    #[error("function is injective on the spectrum; no coarse-graining to exhibit")]
    NotCoarseGraining,

    #[error("search space of {size:e} assignments exceeds the cap of {cap:e}")]
    SearchSpaceTooLarge { size: f64, cap: f64 },

    #[error("invalid classical system: {0}")]
    InvalidClassical(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: {0}")]
    Validation(String),
}
