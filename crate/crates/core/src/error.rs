use thiserror::Error;

/// Errors raised by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular curve: discriminant is zero")]
    SingularCurve,
    #[error("point is not on the curve")]
    PointNotOnCurve,
    #[error("{0} is not a prime")]
    NotPrime(String),
    #[error("curve is not integral at p = {0}")]
    NotIntegral(String),
    #[error("curve has bad reduction at p = {0}")]
    BadReduction(String),
    #[error("Re(s) = {0} lies outside the region of absolute convergence Re(s) > 3/2")]
    OutsideConvergenceRegion(f64),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("generators are dependent modulo torsion (Gram determinant {0:e})")]
    DependentGenerators(f64),
    #[error("matrix is not nilpotent")]
    NotNilpotent,
    #[error("lattice basis is singular")]
    SingularBasis,
    #[error("field of size {0} is too large for enumeration")]
    FieldTooLarge(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
