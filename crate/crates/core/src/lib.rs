//! Exact similarity solutions of an extended two-component mKdV system.
//!
//! The system
//!
//! ```text
//! u_t + u_xxx + alpha [(u^2 + v^2) u]_x + lambda (t+a)^mu [S(v/u) / (u^2 v)]_x = 0
//! v_t + v_xxx + alpha [(u^2 + v^2) v]_x + lambda (t+a)^mu [T(u/v) / (v^2 u)]_x = 0
//! ```
//!
//! reduces under `u = (t+a)^(-1/3) Phi(xi)`, `v = (t+a)^(-1/3) Psi(xi)`,
//! `xi = x / (t+a)^(1/3)` and `mu = -2` to a hybrid Ermakov-Ray-Reid /
//! Painleve II system. The crate integrates that system, monitors its
//! Ermakov invariant, assembles the moving boundary problems it solves and
//! checks every claim through residuals of the original equations.
//!
//! * [`reduction`]: parameters, couplings, exponent balance, field reconstruction
//! * [`erp2`]: reduced-system integration and the invariant
//! * [`painleve`]: canonical Painleve II, Backlund chains, the decoupled specialisation
//! * [`boundary`]: moving boundary problems, boundary constants and shooting
//! * [`pde`]: finite-difference residual of the full system and a direct solver
//! * [`report`]: configuration, JSON/CSV/SVG output and command orchestration

pub mod boundary;
pub mod erp2;
pub mod error;
pub mod fd;
pub mod ode;
pub mod painleve;
pub mod pde;
pub mod reduction;
pub mod report;

pub use error::{Error, Result};
