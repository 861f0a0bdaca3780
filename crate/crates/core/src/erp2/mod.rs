//! Integration of the hybrid Ermakov-Ray-Reid / Painleve II system
//!
//! ```text
//! Phi'' = xi Phi / 3 - alpha (Phi^2 + Psi^2) Phi - lambda S(Psi/Phi) / (Phi^2 Psi) + alpha_I
//! Psi'' = xi Psi / 3 - alpha (Phi^2 + Psi^2) Psi - lambda T / (Psi^2 Phi)         + alpha_II
//! ```
//!
//! and monitoring of its Ermakov-type first integral.

mod invariant;
mod profile;
mod system;

pub use invariant::{
    ermakov_invariant, invariant_candidates, invariant_drift, wronskian, InvariantCandidate,
    InvariantReading, InvariantSeries,
};
pub use profile::{integrate, IntegrationOptions, Method, ReducedProfile};
pub use system::{rhs, ReducedState, ReducedSystem};
