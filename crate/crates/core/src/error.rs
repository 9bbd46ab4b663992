use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("finite-difference stencil leaves the domain at {0}")]
    DomainTooSmall(String),
    #[error("evaluator returned a non-finite value at {0}")]
    NonFinite(String),
    #[error("singular metric: {0}")]
    SingularMetric(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("point outside the domain: {0}")]
    OutOfDomain(String),
    #[error("eigenvalue {0} is not given as an exact rational")]
    IrrationalInput(usize),
    #[error("eigenvalue h[{index}] = {value} must be positive")]
    NonPositiveEigenvalue { index: usize, value: f64 },
    #[error("series shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("dimension {0} exceeds the supported maximum of 4")]
    DimensionTooLarge(usize),
    #[error("degenerate initial data: {0}")]
    DegenerateInitialData(String),
    #[error("invalid initial data: {0}")]
    InvalidInitialData(String),
    #[error("coefficient growth exceeded {limit:e} at order {order}")]
    NonConvergent { order: usize, limit: f64 },
    #[error("r = {r} exceeds the series trust radius {trust}")]
    OutOfTrustRegion { r: f64, trust: f64 },
    #[error("affine symmetry violates constraint `{constraint}` (deviation {deviation:e})")]
    ConstraintViolation { constraint: &'static str, deviation: f64 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
