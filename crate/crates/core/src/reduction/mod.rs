//! System parameters, the Hamiltonian coupling catalogue, the similarity
//! ansatz and reconstruction of space-time fields from reduced profiles.

mod coupling;
mod params;
mod reconstruct;
mod spline;

pub use coupling::{source_functions, CouplingSpec, SourceValues, GUARD_BAND};
pub use params::{
    balance_exponents, reduce_exponents, Balance, ExponentReduction, SimilarityParams,
    SystemParams, Term, Verdict,
};
pub use reconstruct::{reconstruct_fields, reconstruct_with, Fields};
pub use spline::CubicSpline;
