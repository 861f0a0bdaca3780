use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Reduced state captured when an integration stops at a singularity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LastGoodState {
    pub xi: f64,
    pub y: [f64; 4],
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("coupling `{label}` cannot be evaluated at theta = {theta}")]
    EvaluationDomain { label: String, theta: f64 },

    #[error("amplitude guard band violated at xi = {xi} (phi = {phi}, psi = {psi})")]
    SingularState { xi: f64, phi: f64, psi: f64 },

    #[error("singularity approached at xi = {xi} before reaching {target}")]
    SingularityBeforeEnd {
        xi: f64,
        target: f64,
        last_good: LastGoodState,
    },

    #[error("step size underflow at x = {x} (h = {h:e})")]
    StepSizeUnderflow { x: f64, h: f64 },

    #[error("maximum number of steps ({0}) exceeded")]
    TooManySteps(usize),

    #[error("pole detected near z = {z} before reaching {target}")]
    PoleBeforeEnd { z: f64, target: f64 },

    #[error("point {x} lies outside the solved range [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },

    #[error("point z = {0} lies inside a pole guard")]
    InsidePoleGuard(f64),

    #[error("Backlund transformation unavailable: {0}")]
    Backlund(String),

    #[error("grid too coarse: truncation estimate {estimate:e} exceeds {limit:e}")]
    GridTooCoarse { estimate: f64, limit: f64 },

    #[error("finite-difference stencil leaves the reconstructed domain at x = {0}")]
    StencilOutOfDomain(f64),

    #[error("shooting did not converge after {iterations} iterations: {reason}")]
    NoConvergence {
        iterations: usize,
        reason: String,
        residual_history: Vec<f64>,
    },

    #[error("time stepping failed: {0}")]
    TimeStepping(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures caused by bad user input rather than numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_) | Error::Config(_) | Error::Json(_) | Error::Csv(_)
        )
    }
}
