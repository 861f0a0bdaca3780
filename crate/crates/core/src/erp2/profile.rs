use super::system::{ReducedState, ReducedSystem};
use crate::error::{Error, LastGoodState, Result};
use crate::ode::{self, DenseTrajectory, Halt, Knot, StepControl, Tableau};
use crate::reduction::{CouplingSpec, SystemParams};

/// Embedded pair used for an integration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Dormand-Prince 5(4); the production integrator.
    DormandPrince54,
    /// Bogacki-Shampine 3(2); independent lower-order cross-check.
    BogackiShampine32,
}

impl Method {
    pub fn tableau(self) -> &'static Tableau {
        match self {
            Method::DormandPrince54 => &ode::DORMAND_PRINCE_54,
            Method::BogackiShampine32 => &ode::BOGACKI_SHAMPINE_32,
        }
    }

    pub fn name(self) -> &'static str {
        self.tableau().name
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOptions {
    pub tol: f64,
    pub method: Method,
    /// Upper bound on the step length. Fields sampled off-step (boundary and
    /// PDE residuals) need short steps for the interpolant, not just small
    /// local error.
    pub max_step: Option<f64>,
}

impl IntegrationOptions {
    pub fn new(tol: f64) -> Self {
        Self { tol, method: Method::DormandPrince54, max_step: None }
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_max_step(mut self, h: f64) -> Self {
        self.max_step = Some(h);
        self
    }

    fn validate(&self) -> Result<()> {
        if !(1e-14..=1e-6).contains(&self.tol) {
            return Err(Error::InvalidParameter(format!("tol must lie in [1e-14, 1e-6], got {:e}", self.tol)));
        }
        if let Some(h) = self.max_step {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::InvalidParameter(format!("max_step must be positive, got {h}")));
            }
        }
        Ok(())
    }
}

/// Solved trajectory of the reduced system with C² dense output.
#[derive(Debug, Clone)]
pub struct ReducedProfile {
    trajectory: DenseTrajectory,
    system: ReducedSystem,
    options: IntegrationOptions,
    origin: f64,
}

impl ReducedProfile {
    pub fn params(&self) -> &SystemParams {
        &self.system.params
    }

    pub fn coupling(&self) -> &CouplingSpec {
        &self.system.coupling
    }

    pub fn system(&self) -> &ReducedSystem {
        &self.system
    }

    pub fn options(&self) -> &IntegrationOptions {
        &self.options
    }

    pub fn alpha_i(&self) -> f64 {
        self.system.alpha_i
    }

    pub fn alpha_ii(&self) -> f64 {
        self.system.alpha_ii
    }

    /// Abscissa of the initial data.
    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn xi_range(&self) -> (f64, f64) {
        self.trajectory.range()
    }

    pub fn covers(&self, xi: f64) -> bool {
        self.trajectory.contains(xi)
    }

    /// Number of solver knots.
    pub fn len(&self) -> usize {
        self.trajectory.knots().len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// States at the solver knots in increasing `xi`.
    pub fn states(&self) -> Vec<ReducedState> {
        self.trajectory.knots().iter().map(|k| ReducedState::from_slice(k.x, &k.y)).collect()
    }

    /// Second derivatives `(Phi'', Psi'')` at the knots; together with the
    /// states these are the Hermite data of the dense output.
    pub fn knot_accelerations(&self) -> Vec<(f64, f64)> {
        self.trajectory.knots().iter().map(|k| (k.dy[1], k.dy[3])).collect()
    }

    /// Interpolated state at `xi`; never extrapolates.
    pub fn state_at(&self, xi: f64) -> Result<ReducedState> {
        let y = self.trajectory.state(xi)?;
        Ok(ReducedState::from_slice(xi, &y))
    }

    /// Value and first three derivatives of `Phi` (`component = 0`) or `Psi`
    /// (`component = 1`).
    pub fn derivatives(&self, component: usize, xi: f64) -> Result<[f64; 4]> {
        if component > 1 {
            return Err(Error::InvalidParameter(format!("component must be 0 or 1, got {component}")));
        }
        self.trajectory.eval(component, xi)
    }

    /// State at the knot closest to the far end of the integration.
    pub fn terminal(&self) -> ReducedState {
        let k = if self.trajectory.first().x == self.origin && self.len() > 1 {
            self.trajectory.last()
        } else {
            self.trajectory.first()
        };
        ReducedState::from_slice(k.x, &k.y)
    }
}

/// Integrates from `initial` to `xi_end` with the default Dormand-Prince pair.
pub fn integrate(
    initial: ReducedState,
    xi_end: f64,
    params: &SystemParams,
    coupling: &CouplingSpec,
    tol: f64,
) -> Result<ReducedProfile> {
    ReducedProfile::solve(initial, xi_end, ReducedSystem::new(*params, coupling.clone()), IntegrationOptions::new(tol))
}

impl ReducedProfile {
    pub fn solve(
        initial: ReducedState,
        xi_end: f64,
        system: ReducedSystem,
        options: IntegrationOptions,
    ) -> Result<Self> {
        options.validate()?;
        system.params.validate()?;
        if !xi_end.is_finite() || !initial.to_vec().iter().all(|v| v.is_finite()) || !initial.xi.is_finite() {
            return Err(Error::InvalidParameter("initial state and end point must be finite".into()));
        }
        system.accelerations(&initial)?;

        let f = |x: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
            let (a, b) = system.accelerations(&ReducedState::from_slice(x, y))?;
            dy[0] = y[1];
            dy[1] = a;
            dy[2] = y[3];
            dy[3] = b;
            Ok(())
        };
        let mut control = StepControl::new(options.tol);
        control.max_step = options.max_step;
        // starting at the bound keeps knots on a uniform grid whenever the
        // bound, not the error estimate, limits the step
        control.initial_step = options.max_step;
        control.blowup = Some(1e8);
        let knots = ode::integrate(options.method.tableau(), f, initial.xi, &initial.to_vec(), xi_end, &control)
            .map_err(|partial| halt_error(partial.halt, &partial.knots, xi_end))?;
        Ok(Self {
            trajectory: DenseTrajectory::from_knots(knots),
            system,
            options,
            origin: initial.xi,
        })
    }
}

fn halt_error(halt: Halt, knots: &[Knot], target: f64) -> Error {
    let last_good = knots.last().map(|k| LastGoodState { xi: k.x, y: [k.y[0], k.y[1], k.y[2], k.y[3]] });
    let near_singular = |s: &LastGoodState| {
        s.y[0].abs().min(s.y[2].abs()) < 1e-3 || s.y.iter().any(|v| v.abs() > 1e6)
    };
    match (halt, last_good) {
        (Halt::Rhs { error: Error::SingularState { xi, .. }, .. }, Some(lg)) => Error::SingularityBeforeEnd { xi, target, last_good: lg },
        (Halt::Rhs { error, .. }, _) => error,
        (Halt::Blowup { x }, Some(lg)) => Error::SingularityBeforeEnd { xi: x, target, last_good: lg },
        (Halt::Underflow { x, .. }, Some(lg)) if near_singular(&lg) => Error::SingularityBeforeEnd { xi: x, target, last_good: lg },
        (Halt::Underflow { x, h }, _) => Error::StepSizeUnderflow { x, h },
        (Halt::TooManySteps(n), _) => Error::TooManySteps(n),
        (Halt::Blowup { x }, None) => Error::StepSizeUnderflow { x, h: 0.0 },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_interval_gives_single_state() {
        let p = SystemParams::solvable(1.0, 1.0, 1.0).unwrap();
        let init = ReducedState::new(0.3, 1.0, 0.1, 0.8, -0.2);
        let prof = integrate(init, 0.3, &p, &CouplingSpec::quadratic(1.0), 1e-10).unwrap();
        assert_eq!(prof.len(), 1);
        assert_eq!(prof.states()[0], init);
        assert_eq!(prof.state_at(0.3).unwrap(), init);
        assert!(prof.state_at(0.31).is_err());
    }

    #[test]
    fn tolerance_outside_range_is_rejected() {
        let p = SystemParams::solvable(0.0, 0.0, 1.0).unwrap();
        let init = ReducedState::new(0.0, 1.0, 0.0, 1.0, 0.0);
        for tol in [1e-5, 1e-15] {
            assert!(matches!(integrate(init, 1.0, &p, &CouplingSpec::constant(1.0), tol), Err(Error::InvalidParameter(_))));
        }
    }

    #[test]
    fn collapse_onto_zero_amplitude_is_reported() {
        // J = 1 gives Phi'' ~ -2 lambda / Phi^3: Phi is driven into zero
        let p = SystemParams::solvable(0.0, 1.0, 1.0).unwrap();
        let init = ReducedState::new(0.0, 0.5, 0.0, 1.0, 0.0);
        match integrate(init, 5.0, &p, &CouplingSpec::constant(1.0), 1e-10) {
            Err(Error::SingularityBeforeEnd { xi, target, last_good }) => {
                assert_eq!(target, 5.0);
                assert!(xi > 0.0 && xi < 1.0, "xi = {xi}");
                assert!(last_good.y[0].abs() < 1e-2);
            }
            other => panic!("expected singularity, got {other:?}"),
        }
    }

    #[test]
    fn backward_profile_is_ascending_and_terminal_is_far_end() {
        let p = SystemParams::solvable(0.0, 0.0, 1.0).unwrap();
        let init = ReducedState::new(1.0, 1.0, 0.0, 1.0, 0.0);
        let prof = integrate(init, -1.0, &p, &CouplingSpec::constant(1.0), 1e-10).unwrap();
        let xs: Vec<f64> = prof.states().iter().map(|s| s.xi).collect();
        assert!(xs.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(prof.xi_range(), (-1.0, 1.0));
        assert_eq!(prof.terminal().xi, -1.0);
        assert_eq!(prof.origin(), 1.0);
    }
}
