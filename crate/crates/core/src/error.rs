use thiserror::Error;

/// Errors produced by the geometry, hull, covering and polarization routines.
#[derive(Debug, Error)]
pub enum CrossError {
    #[error("cannot normalize a (near-)zero vector, |v| = {norm:e}")]
    ZeroVector { norm: f64 },

    #[error("dimension must be at least 2, got {0}")]
    BadDimension(usize),

    #[error("configuration is not in general position (relative smallest singular value {sigma_ratio:e})")]
    NotGeneralPosition { sigma_ratio: f64 },

    #[error("numerical degeneracy: facet offset {offset:e} is not positive for sigma bitmask {sigma:#b}")]
    NumericalDegeneracy { sigma: u64, offset: f64 },

    #[error("cone generators are rank deficient")]
    DegenerateCone,

    #[error("could not certify a centered witness within tolerance {tol:e} (worst dot {worst:e})")]
    WitnessNotFound { tol: f64, worst: f64 },

    #[error("potential is infinite at every descent start")]
    NonFiniteEverywhere,

    #[error("second-derivative certificate failed for the potential: {0}")]
    CertificateFailed(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid point file: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CrossError>;
