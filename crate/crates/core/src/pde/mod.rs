//! Finite-difference residual of the full two-component system on sampled
//! fields, with term masks and exponent perturbations as negative controls,
//! and a direct method-of-lines solver for cross-checks.

mod band;
mod grid;
mod mol;
mod residual;

pub use band::BandMatrix;
pub use grid::{FieldGrid, GridSpec, Provenance};
pub use mol::{mol_direct_solve, relative_l2_distance, DirectSolution, MolResolution, StripSolution, MOL_ORDER};
pub use residual::{pde_residual, pde_residual_masked, GridMeta, ResidualReport, TermMask, EDGE_ORDER, INTERIOR_ORDER};
