use serde::Serialize;

use super::verify::STENCIL_DIVISIONS;
use crate::erp2::{IntegrationOptions, ReducedProfile, ReducedState, ReducedSystem};
use crate::error::{Error, Result};
use crate::reduction::{CouplingSpec, SystemParams};

/// Region `gamma1 (t+a)^(1/3) <= x <= gamma2 (t+a)^(1/3)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    pub gamma1: f64,
    pub gamma2: f64,
    pub a: f64,
}

impl Geometry {
    pub fn new(gamma1: f64, gamma2: f64, a: f64) -> Result<Self> {
        let g = Self { gamma1, gamma2, a };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma1.is_finite() && self.gamma2.is_finite()) || self.gamma1 >= self.gamma2 {
            return Err(Error::InvalidParameter(format!(
                "boundary coefficients need gamma1 < gamma2, got {} and {}",
                self.gamma1, self.gamma2
            )));
        }
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::InvalidParameter(format!("time shift a must be positive, got {}", self.a)));
        }
        Ok(())
    }
}

/// Positions and velocities of the two moving boundaries at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryCurves {
    pub sigma1: f64,
    pub sigma2: f64,
    pub sigma1_dot: f64,
    pub sigma2_dot: f64,
}

/// Moving boundary problem whose solution is given by a reduced profile.
#[derive(Debug, Clone)]
pub struct MovingBoundaryProblem {
    geometry: Geometry,
    profile: ReducedProfile,
}

impl MovingBoundaryProblem {
    /// Wraps a solved profile. The profile must cover `[gamma1, gamma2]` and
    /// have vanishing integration constants.
    pub fn new(gamma1: f64, gamma2: f64, profile: ReducedProfile) -> Result<Self> {
        let geometry = Geometry::new(gamma1, gamma2, profile.params().a)?;
        if profile.alpha_i() != 0.0 || profile.alpha_ii() != 0.0 {
            return Err(Error::InvalidParameter(
                "moving boundary problems need vanishing integration constants".into(),
            ));
        }
        for g in [gamma1, gamma2] {
            if !profile.covers(g) {
                let (lo, hi) = profile.xi_range();
                return Err(Error::OutOfDomain { x: g, lo, hi });
            }
        }
        Ok(Self { geometry, profile })
    }

    /// Integrates from `(Phi, Phi', Psi, Psi')` at `gamma1` across the region.
    ///
    /// Without an explicit step bound the step is capped at the boundary
    /// stencil spacing, so finite differences of the fields sample knots.
    pub fn build(
        geometry: Geometry,
        start: [f64; 4],
        params: SystemParams,
        coupling: CouplingSpec,
        mut options: IntegrationOptions,
    ) -> Result<Self> {
        geometry.validate()?;
        if params.a != geometry.a {
            return Err(Error::InvalidParameter(format!(
                "geometry time shift {} differs from system time shift {}",
                geometry.a, params.a
            )));
        }
        if options.max_step.is_none() {
            options.max_step = Some((geometry.gamma2 - geometry.gamma1) / STENCIL_DIVISIONS);
        }
        let initial = ReducedState::new(geometry.gamma1, start[0], start[1], start[2], start[3]);
        let profile = ReducedProfile::solve(initial, geometry.gamma2, ReducedSystem::new(params, coupling), options)?;
        Self::new(geometry.gamma1, geometry.gamma2, profile)
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn gamma1(&self) -> f64 {
        self.geometry.gamma1
    }

    pub fn gamma2(&self) -> f64 {
        self.geometry.gamma2
    }

    pub fn a(&self) -> f64 {
        self.geometry.a
    }

    pub fn params(&self) -> &SystemParams {
        self.profile.params()
    }

    pub fn coupling(&self) -> &CouplingSpec {
        self.profile.coupling()
    }

    pub fn profile(&self) -> &ReducedProfile {
        &self.profile
    }

    /// Profile data `(Phi, Phi', Psi, Psi')` at `gamma1`.
    pub fn start(&self) -> Result<[f64; 4]> {
        let s = self.profile.state_at(self.gamma1())?;
        Ok([s.phi, s.phi_prime, s.psi, s.psi_prime])
    }
}

/// `Sigma_k = gamma_k (t+a)^(1/3)` and `Sigma_k' = (gamma_k / 3) (t+a)^(-2/3)`.
pub fn boundary_curves(geometry: &Geometry, t: f64) -> Result<BoundaryCurves> {
    let s = t + geometry.a;
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidParameter(format!("t + a must be positive (t = {t}, a = {})", geometry.a)));
    }
    let c = s.cbrt();
    let rate = 1.0 / (3.0 * c * c);
    Ok(BoundaryCurves {
        sigma1: geometry.gamma1 * c,
        sigma2: geometry.gamma2 * c,
        sigma1_dot: geometry.gamma1 * rate,
        sigma2_dot: geometry.gamma2 * rate,
    })
}

/// Constants of the boundary conditions.
///
/// Flux conditions: `u_xx + alpha (u^2+v^2) u + lambda (t+a)^mu S/(u^2 v) = L_m Sigma1^i Sigma1'`
/// on `Sigma1`, and the analogue with `T`, `M_m` on `Sigma2`. Value
/// conditions: `u = P_m Sigma1^j` on `Sigma1`, `v = R_m Sigma2^l` on `Sigma2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryConstants {
    pub l_m: f64,
    pub m_m: f64,
    pub p_m: f64,
    pub r_m: f64,
    pub i: i32,
    pub j: i32,
    pub l: i32,
}

impl BoundaryConstants {
    /// Copy with `L_m` scaled, used to probe the sensitivity of the checks.
    pub fn with_l_m(mut self, l_m: f64) -> Self {
        self.l_m = l_m;
        self
    }
}

/// `L_m = P_m = gamma1 Phi(gamma1)`, `M_m = R_m = gamma2 Psi(gamma2)` and
/// `i = j = l = -1`.
pub fn derive_constants(mbp: &MovingBoundaryProblem) -> Result<BoundaryConstants> {
    let left = mbp.profile.state_at(mbp.gamma1())?;
    let right = mbp.profile.state_at(mbp.gamma2())?;
    let l_m = mbp.gamma1() * left.phi;
    let m_m = mbp.gamma2() * right.psi;
    Ok(BoundaryConstants { l_m, m_m, p_m: l_m, r_m: m_m, i: -1, j: -1, l: -1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_examples() {
        let g = Geometry::new(1.0, 2.0, 1.0).unwrap();
        let c = boundary_curves(&g, 0.0).unwrap();
        assert!((c.sigma1 - 1.0).abs() < 1e-15 && (c.sigma1_dot - 1.0 / 3.0).abs() < 1e-15);
        let c = boundary_curves(&g, 7.0).unwrap();
        assert!((c.sigma2 - 4.0).abs() < 1e-14 && (c.sigma2_dot - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_geometry_is_rejected() {
        assert!(Geometry::new(1.0, 1.0, 1.0).is_err());
        assert!(Geometry::new(0.0, 1.0, 0.0).is_err());
        let g = Geometry { gamma1: 0.5, gamma2: 1.0, a: 1.0 };
        assert!(boundary_curves(&g, -1.0).is_err());
    }

    #[test]
    fn zero_amplitude_gives_zero_constant() {
        let p = SystemParams::solvable(0.0, 0.0, 1.0).unwrap();
        let mbp = MovingBoundaryProblem::build(
            Geometry::new(0.5, 1.5, 1.0).unwrap(),
            [0.0, 1.0, 1.0, 0.0],
            p,
            CouplingSpec::constant(1.0),
            IntegrationOptions::new(1e-10),
        )
        .unwrap();
        let c = derive_constants(&mbp).unwrap();
        assert_eq!((c.l_m, c.p_m), (0.0, 0.0));
        assert_eq!(c.r_m, c.m_m);
        assert_eq!((c.i, c.j, c.l), (-1, -1, -1));
    }
}
