use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{z} lies on the dilogarithm branch cut [1, +inf)")]
    BranchCut { z: Complex64 },

    #[error("Re z = {re} is outside the strip ({lo}, {hi}) for hbar = {hbar}")]
    OutsideStrip { re: f64, lo: f64, hi: f64, hbar: f64 },

    #[error("quadrature did not reach tolerance {tolerance:e} (error estimate {estimate:e})")]
    QuadratureNonconvergence { tolerance: f64, estimate: f64 },

    #[error("{z} is within {distance:e} of a pole of the quantum dilogarithm")]
    PoleProximity { z: Complex64, distance: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("{what}: residual {residual:e} exceeds {tolerance:e}")]
    Residual { what: String, residual: f64, tolerance: f64 },

    #[error("exp(theta_v) differs from a0*b0*c0 (relative mismatch {mismatch:e})")]
    ThetaMismatch { mismatch: f64 },

    #[error("winding number {which} is not an integer (residual {residual:e})")]
    NonIntegerWinding { which: &'static str, residual: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("log-magnitude {log_magnitude:.1} exceeds the f64 range; use the log-domain variant")]
    Overflow { log_magnitude: f64 },

    #[error("singular: {0}")]
    Singular(String),

    #[error("maximum of f on [{a}, {b}] is attained at the boundary point {at}")]
    MaximumOnBoundary { a: f64, b: f64, at: f64 },

    #[error("resource guard: {0}")]
    ResourceLimit(String),
}
