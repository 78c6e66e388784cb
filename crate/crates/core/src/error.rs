use thiserror::Error;

/// Errors raised by geometry, transforms, norms and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("singular or ill-conditioned basis: {0}")]
    SingularBasis(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unbounded region: {0}")]
    UnboundedRegion(String),

    #[error("non-finite value at grid point {point:?}")]
    NonFinite { point: Vec<f64> },

    #[error("insufficient decay: boundary mass {mass:.3e} exceeds {limit:.1e}")]
    InsufficientDecay { mass: f64, limit: f64 },

    #[error("window too wide for the box: boundary mass {mass:.3e} of the L2 norm")]
    WindowTooWide { mass: f64 },

    #[error("grid does not resolve the lattice: {0}")]
    GridMismatch(String),

    #[error("quasi-periodicity violated: relative defect {0:.3e}")]
    NotQuasiPeriodic(f64),

    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(String),

    #[error("exponent hypothesis violated: {0}")]
    ExponentHypothesis(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("weight bound violated: {0}")]
    WeightBound(String),

    #[error("serialization error: {0}")]
    Serialization(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
