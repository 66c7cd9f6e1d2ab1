use thiserror::Error;

/// Errors raised across the solver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate boundary conditions: {0}")]
    DegenerateBoundary(String),

    #[error("velocity vanishes at t = {t} (speed {speed:e}); curvature is undefined there")]
    VanishingVelocity { t: f64, speed: f64 },

    #[error("integrand is not integrable: {0}")]
    NonIntegrable(String),

    #[error("trajectory has zero cost (it is a single point)")]
    ZeroCost,

    #[error("homothety factor must be nonzero")]
    ZeroScale,

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("could not bracket a switching time near t = {0}")]
    EventDetectionFailure(f64),

    #[error("invalid extremal specification: {0}")]
    InvalidSpec(String),

    #[error("no shooting start converged (best mismatch {best_mismatch:e})")]
    NoConvergence { best_mismatch: f64 },

    #[error("xi = {xi} is too large: {reason}")]
    XiTooLarge { xi: f64, reason: String },

    #[error("construction lines are parallel (|r ^ s| = {0:e})")]
    DegenerateIntersection(f64),

    #[error("discrete curve has a degenerate segment at index {0}")]
    DegenerateSegment(usize),

    #[error("no restart reduced the cost below its initializer")]
    NoDescent,

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
