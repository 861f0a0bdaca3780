//! Canonical Painleve II `w'' = sigma 2 w^3 + z w + alpha_p`: numerical
//! solutions, the Lukashevich Backlund transformation and its hierarchy, the
//! map from the single-component reduced equation, and the decoupled
//! Ermakov-Painleve II specialization.

mod backlund;
mod dd;
mod decoupled;
mod jet;
mod scaling;
mod solution;

pub use backlund::{backlund_hierarchy, lukashevich_bt};
pub use decoupled::{decoupled_coupling, decoupled_erp2_rhs, integrate_decoupled, SourceReading};
pub use jet::{painleve_jet, Jet};
pub use scaling::{map_reduced_to_pii, mapped_residual, PiiScaling};
pub use solution::{
    pii_integrate, pii_integrate_tracking, Direction, PiiSolution, PoleGuard, Sigma, SolutionKind,
    BLOWUP_THRESHOLD, POLE_GUARD_RADIUS,
};
