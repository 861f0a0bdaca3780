//! Explicit embedded Runge-Kutta integration and dense output for
//! second-order systems.

mod dense;
mod hermite;
mod rk;

pub use dense::DenseTrajectory;
pub use hermite::{quintic_hermite, HermiteNode};
pub use rk::{
    integrate, Halt, Knot, PartialTrajectory, StepControl, Tableau, BOGACKI_SHAMPINE_32,
    DORMAND_PRINCE_54,
};
