use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::reduction::{CouplingSpec, SystemParams};

/// Point of a reduced trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedState {
    pub xi: f64,
    pub phi: f64,
    pub phi_prime: f64,
    pub psi: f64,
    pub psi_prime: f64,
}

impl ReducedState {
    pub fn new(xi: f64, phi: f64, phi_prime: f64, psi: f64, psi_prime: f64) -> Self {
        Self { xi, phi, phi_prime, psi, psi_prime }
    }

    pub(crate) fn to_vec(self) -> [f64; 4] {
        [self.phi, self.phi_prime, self.psi, self.psi_prime]
    }

    pub(crate) fn from_slice(xi: f64, y: &[f64]) -> Self {
        Self::new(xi, y[0], y[1], y[2], y[3])
    }
}

/// Reduced system together with its integration constants.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub params: SystemParams,
    pub coupling: CouplingSpec,
    pub alpha_i: f64,
    pub alpha_ii: f64,
}

impl ReducedSystem {
    /// The moving-boundary class: both integration constants vanish.
    pub fn new(params: SystemParams, coupling: CouplingSpec) -> Self {
        Self { params, coupling, alpha_i: 0.0, alpha_ii: 0.0 }
    }

    pub fn with_integration_constants(mut self, alpha_i: f64, alpha_ii: f64) -> Self {
        self.alpha_i = alpha_i;
        self.alpha_ii = alpha_ii;
        self
    }

    /// `(Phi'', Psi'')` at a state. Source terms are skipped when `lambda = 0`.
    pub fn accelerations(&self, s: &ReducedState) -> Result<(f64, f64)> {
        let p = &self.params;
        let r2 = s.phi * s.phi + s.psi * s.psi;
        let mut phi_dd = s.xi * s.phi / 3.0 - p.alpha * r2 * s.phi + self.alpha_i;
        let mut psi_dd = s.xi * s.psi / 3.0 - p.alpha * r2 * s.psi + self.alpha_ii;
        if p.lambda != 0.0 {
            let (fs, ft) = self.coupling.source_terms(s.phi, s.psi, s.xi)?;
            phi_dd -= p.lambda * fs;
            psi_dd -= p.lambda * ft;
        }
        Ok((phi_dd, psi_dd))
    }
}

/// Second derivatives of the reduced system with `alpha_I = alpha_II = 0`.
pub fn rhs(state: &ReducedState, params: &SystemParams, coupling: &CouplingSpec) -> Result<(f64, f64)> {
    ReducedSystem::new(*params, coupling.clone()).accelerations(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn params(alpha: f64, lambda: f64) -> SystemParams {
        SystemParams::solvable(alpha, lambda, 1.0).unwrap()
    }

    #[test]
    fn painleve_term_only() {
        let s = ReducedState::new(3.0, 1.0, 0.0, 1.0, 0.0);
        let (a, b) = rhs(&s, &params(0.0, 0.0), &CouplingSpec::constant(1.0)).unwrap();
        assert_eq!((a, b), (1.0, 1.0));
    }

    #[test]
    fn cubic_term_only() {
        let s = ReducedState::new(0.0, 1.0, 0.0, 2.0, 0.0);
        let (a, b) = rhs(&s, &params(1.0, 0.0), &CouplingSpec::constant(1.0)).unwrap();
        assert_eq!((a, b), (-5.0, -10.0));
    }

    #[test]
    fn quadratic_coupling_hand_substitution() {
        // S = 4, T = -2 at theta = 1: Phi'' = -2 - 4, Psi'' = -2 + 2
        let s = ReducedState::new(0.0, 1.0, 0.3, 1.0, -0.2);
        let (a, b) = rhs(&s, &params(1.0, 1.0), &CouplingSpec::quadratic(1.0)).unwrap();
        assert_eq!((a, b), (-6.0, 0.0));
    }

    #[test]
    fn integration_constants_shift_accelerations() {
        let s = ReducedState::new(0.0, 1.0, 0.0, 1.0, 0.0);
        let sys = ReducedSystem::new(params(0.0, 0.0), CouplingSpec::constant(1.0)).with_integration_constants(0.5, -0.25);
        assert_eq!(sys.accelerations(&s).unwrap(), (0.5, -0.25));
    }

    #[test]
    fn guard_band_reports_xi() {
        let s = ReducedState::new(0.75, 0.0, 1.0, 1.0, 0.0);
        match rhs(&s, &params(1.0, 1.0), &CouplingSpec::constant(1.0)) {
            Err(Error::SingularState { xi, .. }) => assert_eq!(xi, 0.75),
            other => panic!("{other:?}"),
        }
    }
}
