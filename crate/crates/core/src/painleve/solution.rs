use std::sync::Arc;

use serde::Serialize;

use super::jet::{painleve_jet, Jet};
use crate::error::{Error, Result};
use crate::ode::{self, DenseTrajectory, Halt, StepControl};

/// Radius of the excluded neighbourhood around a detected pole.
pub const POLE_GUARD_RADIUS: f64 = 0.1;
/// Magnitude at which a numeric solution is declared to be at a pole.
pub const BLOWUP_THRESHOLD: f64 = 1e6;

/// Sign in `w'' = sigma 2 w^3 + z w + alpha_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sigma {
    Plus,
    Minus,
}

impl Sigma {
    pub fn value(self) -> f64 {
        match self {
            Sigma::Plus => 1.0,
            Sigma::Minus => -1.0,
        }
    }

    pub fn from_sign(s: f64) -> Self {
        if s < 0.0 {
            Sigma::Minus
        } else {
            Sigma::Plus
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolutionKind {
    ExactRational,
    Numeric,
}

impl SolutionKind {
    /// Admissible residual outside pole guards.
    pub fn residual_tolerance(self) -> f64 {
        match self {
            SolutionKind::ExactRational => 1e-12,
            SolutionKind::Numeric => 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    /// `alpha_p -> alpha_p + 1`.
    Up,
    /// `alpha_p -> alpha_p - 1`.
    Down,
}

#[derive(Debug, Clone)]
pub(crate) enum Representation {
    Zero,
    Numeric(Arc<DenseTrajectory>),
    Backlund { base: Arc<PiiSolution>, direction: Direction },
}

/// Closed interval excluded from evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoleGuard {
    /// Location of the pole or vanishing denominator.
    pub center: f64,
    pub lo: f64,
    pub hi: f64,
}

impl PoleGuard {
    pub fn around(center: f64) -> Self {
        Self { center, lo: center - POLE_GUARD_RADIUS, hi: center + POLE_GUARD_RADIUS }
    }

    pub fn contains(&self, z: f64) -> bool {
        z >= self.lo && z <= self.hi
    }
}

/// A solution of the canonical Painleve II equation.
#[derive(Debug, Clone)]
pub struct PiiSolution {
    pub(crate) alpha_p: f64,
    pub(crate) sigma: Sigma,
    pub(crate) kind: SolutionKind,
    pub(crate) repr: Representation,
    pub(crate) pole_guards: Vec<PoleGuard>,
    /// Evaluation interval; `None` means the whole real line.
    pub(crate) domain: Option<(f64, f64)>,
}

impl PiiSolution {
    /// The seed `w = 0` at `alpha_p = 0`.
    pub fn zero(sigma: Sigma) -> Self {
        Self {
            alpha_p: 0.0,
            sigma,
            kind: SolutionKind::ExactRational,
            repr: Representation::Zero,
            pole_guards: Vec::new(),
            domain: None,
        }
    }

    pub fn alpha_p(&self) -> f64 {
        self.alpha_p
    }

    pub fn sigma(&self) -> Sigma {
        self.sigma
    }

    pub fn kind(&self) -> SolutionKind {
        self.kind
    }

    pub fn pole_guards(&self) -> &[PoleGuard] {
        &self.pole_guards
    }

    pub fn domain(&self) -> Option<(f64, f64)> {
        self.domain
    }

    /// Number of Backlund steps separating this solution from its seed.
    pub fn depth(&self) -> usize {
        match &self.repr {
            Representation::Backlund { base, .. } => 1 + base.depth(),
            _ => 0,
        }
    }

    pub fn is_guarded(&self, z: f64) -> bool {
        self.pole_guards.iter().any(|g| g.contains(z))
    }

    pub fn in_domain(&self, z: f64) -> bool {
        self.domain.is_none_or(|(lo, hi)| z >= lo && z <= hi)
    }

    fn check_point(&self, z: f64) -> Result<()> {
        if !z.is_finite() {
            return Err(Error::InvalidParameter(format!("non-finite z = {z}")));
        }
        if let Some((lo, hi)) = self.domain {
            if !(z >= lo && z <= hi) {
                return Err(Error::OutOfDomain { x: z, lo, hi });
            }
        }
        if self.is_guarded(z) {
            return Err(Error::InsidePoleGuard(z));
        }
        Ok(())
    }

    /// Taylor jet of `w` at `z` up to the given order.
    pub fn jet(&self, z: f64, order: usize) -> Result<Jet> {
        self.check_point(z)?;
        self.jet_unchecked(z, order)
    }

    pub(crate) fn jet_unchecked(&self, z: f64, order: usize) -> Result<Jet> {
        match &self.repr {
            Representation::Zero => Ok(Jet::constant(0.0, order)),
            Representation::Numeric(traj) => {
                let [w, wp, _, _] = traj.eval(0, z)?;
                Ok(painleve_jet(z, w, wp, self.alpha_p, self.sigma.value(), order))
            }
            Representation::Backlund { base, direction } => {
                let w = base.jet_unchecked(z, order + 1)?;
                super::backlund::transform_jet(&w, z, base.alpha_p, *direction, order)
                    .ok_or(Error::InsidePoleGuard(z))
            }
        }
    }

    /// `(w, w')` at `z`.
    pub fn eval(&self, z: f64) -> Result<(f64, f64)> {
        self.check_point(z)?;
        match &self.repr {
            Representation::Numeric(traj) => {
                let [w, wp, _, _] = traj.eval(0, z)?;
                Ok((w, wp))
            }
            _ => {
                let j = self.jet_unchecked(z, 1)?;
                Ok((j.value(), j.derivative_value(1)))
            }
        }
    }

    /// `|w'' - (sigma 2 w^3 + z w + alpha_p)|` at `z`.
    ///
    /// Numeric solutions use the second derivative of their dense output;
    /// Backlund images and exact seeds differentiate their closed form.
    pub fn residual(&self, z: f64) -> Result<f64> {
        self.check_point(z)?;
        let (w, w2) = match &self.repr {
            Representation::Numeric(traj) => {
                let [w, _, w2, _] = traj.eval(0, z)?;
                (w, w2)
            }
            _ => {
                let j = self.jet_unchecked(z, 2)?;
                (j.value(), j.derivative_value(2))
            }
        };
        Ok((w2 - (2.0 * self.sigma.value() * w * w * w + z * w + self.alpha_p)).abs())
    }

    /// Maximum residual over the points of `zs` that are evaluable.
    pub fn max_residual(&self, zs: &[f64]) -> Result<f64> {
        let mut worst = 0.0f64;
        for &z in zs {
            if self.is_guarded(z) || !self.in_domain(z) {
                continue;
            }
            worst = worst.max(self.residual(z)?);
        }
        Ok(worst)
    }
}

/// Numerical integration of `w'' = sigma 2 w^3 + z w + alpha_p`.
///
/// Fails with [`Error::PoleBeforeEnd`] if the solution blows up first; use
/// [`pii_integrate_tracking`] to keep the partial solution instead.
pub fn pii_integrate(
    z0: f64,
    w0: f64,
    w0_prime: f64,
    alpha_p: f64,
    sigma: Sigma,
    z_end: f64,
    tol: f64,
) -> Result<PiiSolution> {
    let (sol, pole) = pii_integrate_tracking(z0, w0, w0_prime, alpha_p, sigma, z_end, tol)?;
    match pole {
        Some(z) => Err(Error::PoleBeforeEnd { z, target: z_end }),
        None => Ok(sol),
    }
}

/// Like [`pii_integrate`], but a pole ends the solution's domain instead of
/// failing. Returns the solution and the pole location, if any.
pub fn pii_integrate_tracking(
    z0: f64,
    w0: f64,
    w0_prime: f64,
    alpha_p: f64,
    sigma: Sigma,
    z_end: f64,
    tol: f64,
) -> Result<(PiiSolution, Option<f64>)> {
    if !(1e-14..=1e-6).contains(&tol) {
        return Err(Error::InvalidParameter(format!("tol must lie in [1e-14, 1e-6], got {tol:e}")));
    }
    if ![z0, w0, w0_prime, alpha_p, z_end].iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidParameter("Painleve II data must be finite".into()));
    }
    let s = sigma.value();
    let f = |z: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
        dy[0] = y[1];
        dy[1] = 2.0 * s * y[0] * y[0] * y[0] + z * y[0] + alpha_p;
        Ok(())
    };
    // short steps keep the dense second derivative within the residual budget
    let control = StepControl::new(tol).with_max_step(0.01).with_blowup(BLOWUP_THRESHOLD);
    let (knots, pole) = match ode::integrate(&ode::DORMAND_PRINCE_54, f, z0, &[w0, w0_prime], z_end, &control) {
        Ok(k) => (k, None),
        Err(partial) => match partial.halt {
            Halt::Blowup { x } | Halt::Underflow { x, .. } => {
                let last = partial.knots.last().expect("blowup after first knot");
                let dir = (z_end - z0).signum();
                // simple pole: |w| ~ 1 / |z - z_pole|
                let z_pole = x + dir / last.y[0].abs().max(1.0);
                let mut knots = partial.knots;
                let cut = z_pole - dir * POLE_GUARD_RADIUS;
                knots.retain(|k| (k.x - cut) * dir <= 0.0);
                if knots.len() < 2 {
                    return Err(Error::PoleBeforeEnd { z: z_pole, target: z_end });
                }
                (knots, Some(z_pole))
            }
            Halt::Rhs { error, .. } => return Err(error),
            Halt::TooManySteps(n) => return Err(Error::TooManySteps(n)),
        },
    };
    let traj = DenseTrajectory::from_knots(knots);
    let domain = traj.range();
    let pole_guards = pole.map(PoleGuard::around).into_iter().collect();
    Ok((
        PiiSolution {
            alpha_p,
            sigma,
            kind: SolutionKind::Numeric,
            repr: Representation::Numeric(Arc::new(traj)),
            pole_guards,
            domain: Some(domain),
        },
        pole,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_seed_stays_zero() {
        let s = pii_integrate(0.0, 0.0, 0.0, 0.0, Sigma::Plus, 4.0, 1e-10).unwrap();
        for z in [0.0, 1.3, 4.0] {
            assert_eq!(s.eval(z).unwrap(), (0.0, 0.0));
        }
    }

    #[test]
    fn tracks_minus_one_over_z() {
        let s = pii_integrate(1.0, -1.0, 1.0, 1.0, Sigma::Plus, 5.0, 1e-12).unwrap();
        for i in 0..=80 {
            let z = 1.0 + 4.0 * i as f64 / 80.0;
            let (w, wp) = s.eval(z).unwrap();
            assert!((w + 1.0 / z).abs() < 1e-8, "z = {z}");
            assert!((wp - 1.0 / (z * z)).abs() < 1e-8);
        }
        assert!(s.max_residual(&[1.5, 2.5, 4.9]).unwrap() < 1e-8);
    }

    #[test]
    fn pole_is_reported_and_tracked() {
        // w = 1/(1 - z) solves w'' = 2 w^3 with no linear term only approximately;
        // any large positive data blows up quickly for sigma = +1
        let err = pii_integrate(0.0, 2.0, 4.0, 0.0, Sigma::Plus, 3.0, 1e-10).unwrap_err();
        let Error::PoleBeforeEnd { z, target } = err else { panic!("{err:?}") };
        assert_eq!(target, 3.0);
        assert!(z > 0.0 && z < 1.0, "z = {z}");

        let (sol, pole) = pii_integrate_tracking(0.0, 2.0, 4.0, 0.0, Sigma::Plus, 3.0, 1e-10).unwrap();
        let zp = pole.unwrap();
        assert!(sol.is_guarded(zp));
        assert!(matches!(sol.eval(zp + 0.05), Err(Error::InsidePoleGuard(_)) | Err(Error::OutOfDomain { .. })));
        assert!(sol.eval(0.1).is_ok());
    }

    #[test]
    fn defocusing_sign_has_no_blowup_for_small_data() {
        let s = pii_integrate(0.0, 0.5, 0.0, 0.3, Sigma::Minus, 3.0, 1e-10).unwrap();
        assert!(s.max_residual(&[0.5, 1.5, 2.5]).unwrap() < 1e-8);
    }
}
