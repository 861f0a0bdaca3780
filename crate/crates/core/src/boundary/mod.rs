//! Moving boundary problems solved by the similarity reduction: boundary
//! curves `Sigma_k = gamma_k (t+a)^(1/3)`, the constants of the boundary
//! conditions, their verification against reconstructed fields, and
//! shooting for prescribed constants.

mod problem;
mod shoot;
mod verify;

pub use problem::{boundary_curves, derive_constants, BoundaryConstants, BoundaryCurves, Geometry, MovingBoundaryProblem};
pub use shoot::{
    shoot_for_targets, Auxiliary, FreeParameter, FreeStart, ShootingOptions, ShootingOutcome, Targets,
};
pub use verify::{
    fit_boundary_exponents, log_log_slope, log_spaced_times, verify_boundary_conditions, BoundaryReport, Condition,
    ConditionResidual, ExponentFit, TimeSample, DEFAULT_SAMPLE_TIMES, STENCIL_DIVISIONS,
};
