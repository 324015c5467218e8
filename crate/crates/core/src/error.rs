use thiserror::Error;

use crate::vsh::VshFamily;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid harmonic index (l = {degree}, m = {order}): |m| must not exceed l")]
    InvalidIndex { degree: usize, order: i32 },

    #[error("family {family} has no members of degree {degree}")]
    EmptyFamily { family: VshFamily, degree: usize },

    #[error("expected a unit vector, got norm {0}")]
    NotUnit(f64),

    #[error("point with norm {norm} lies outside the admissible region (limit {limit})")]
    OutsideBall { norm: f64, limit: f64 },

    #[error("point with norm {norm} is too close to the boundary for kernel quadrature (limit {limit}); use the spectral solution instead")]
    TooCloseToBoundary { norm: f64, limit: f64 },

    #[error("grid exactness degree {available} is below the required {required}")]
    InsufficientExactness { available: usize, required: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("exponent p = {0} is not admissible (need p >= 1 or p = inf)")]
    InvalidExponent(f64),

    #[error("ineligible Lamé parameters: {constraint} is violated (lambda = {lambda}, mu = {mu})")]
    IneligibleParameters {
        constraint: &'static str,
        lambda: f64,
        mu: f64,
    },

    #[error("finite-difference step {step} too large at |x| = {norm}: need |x| + 2h < 1")]
    StepTooLarge { step: f64, norm: f64 },

    #[error("expansion has {family} coefficients but only {expected} was expected")]
    MixedFamilies {
        family: VshFamily,
        expected: VshFamily,
    },

    #[error("t-integral quadrature did not converge: relative change {change:e} after {nodes} nodes")]
    QuadratureNotConverged { change: f64, nodes: usize },

    #[error("band limit mismatch: {0}")]
    BandLimit(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("{path}: malformed input: {message}")]
    Format { path: String, message: String },

    #[error("{0}")]
    Usage(String),
}
