use serde::{Deserialize, Serialize};

use super::problem::{Geometry, MovingBoundaryProblem};
use crate::erp2::{ermakov_invariant, IntegrationOptions, ReducedState};
use crate::error::{Error, Result};
use crate::reduction::{CouplingSpec, SystemParams};

/// Boundary constants to be reached by shooting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Targets {
    pub p_m: f64,
    pub r_m: f64,
}

/// Start data at `gamma1` not fixed by `P_m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreeStart {
    pub phi_prime: f64,
    pub psi: f64,
    pub psi_prime: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreeParameter {
    PhiPrime,
    Psi,
    PsiPrime,
}

impl FreeParameter {
    fn get(self, f: &FreeStart) -> f64 {
        match self {
            FreeParameter::PhiPrime => f.phi_prime,
            FreeParameter::Psi => f.psi,
            FreeParameter::PsiPrime => f.psi_prime,
        }
    }

    fn set(self, f: &mut FreeStart, v: f64) {
        match self {
            FreeParameter::PhiPrime => f.phi_prime = v,
            FreeParameter::Psi => f.psi = v,
            FreeParameter::PsiPrime => f.psi_prime = v,
        }
    }
}

/// Second condition closing the shooting system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Auxiliary {
    /// Prescribed value of the Ermakov invariant.
    Invariant(f64),
    /// Prescribed `Psi(gamma1)`.
    PsiStart(f64),
    /// Prescribed `Phi'(gamma1)`.
    PhiPrimeStart(f64),
}

impl Auxiliary {
    /// Parameters adjusted by default alongside this condition.
    pub fn default_unknowns(self) -> [FreeParameter; 2] {
        match self {
            Auxiliary::Invariant(_) | Auxiliary::PsiStart(_) => [FreeParameter::Psi, FreeParameter::PsiPrime],
            Auxiliary::PhiPrimeStart(_) => [FreeParameter::PhiPrime, FreeParameter::PsiPrime],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingOptions {
    pub auxiliary: Auxiliary,
    pub unknowns: [FreeParameter; 2],
    pub max_iterations: usize,
    /// Convergence threshold on the residual norm.
    pub residual_tol: f64,
    pub integration: IntegrationOptions,
}

impl ShootingOptions {
    pub fn new(auxiliary: Auxiliary, integration: IntegrationOptions) -> Self {
        Self {
            auxiliary,
            unknowns: auxiliary.default_unknowns(),
            max_iterations: 50,
            residual_tol: 1e-11,
            integration,
        }
    }

    pub fn with_unknowns(mut self, unknowns: [FreeParameter; 2]) -> Self {
        self.unknowns = unknowns;
        self
    }
}

/// Converged shooting run.
#[derive(Debug, Clone)]
pub struct ShootingOutcome {
    pub problem: MovingBoundaryProblem,
    pub start: FreeStart,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
}

struct Shooter<'a> {
    geometry: Geometry,
    phi_start: f64,
    r_target: f64,
    params: SystemParams,
    coupling: &'a CouplingSpec,
    options: &'a ShootingOptions,
}

impl Shooter<'_> {
    fn start(&self, free: &FreeStart) -> [f64; 4] {
        [self.phi_start, free.phi_prime, free.psi, free.psi_prime]
    }

    fn residual(&self, free: &FreeStart) -> Result<[f64; 2]> {
        let mbp = MovingBoundaryProblem::build(
            self.geometry,
            self.start(free),
            self.params,
            self.coupling.clone(),
            self.options.integration,
        )?;
        let end = mbp.profile().terminal();
        let aux = match self.options.auxiliary {
            Auxiliary::Invariant(target) => {
                let s = ReducedState::new(self.geometry.gamma1, self.phi_start, free.phi_prime, free.psi, free.psi_prime);
                ermakov_invariant(&s, &self.params, self.coupling)? - target
            }
            Auxiliary::PsiStart(v) => free.psi - v,
            Auxiliary::PhiPrimeStart(v) => free.phi_prime - v,
        };
        Ok([end.psi - self.r_target, aux])
    }
}

fn norm(r: &[f64; 2]) -> f64 {
    r[0].hypot(r[1])
}

/// Fixes `Phi(gamma1) = P_m / gamma1` and adjusts two start parameters by
/// damped Newton iteration until `Psi(gamma2) = R_m / gamma2` and the
/// auxiliary condition hold. The Jacobian is formed by finite differences.
pub fn shoot_for_targets(
    targets: Targets,
    geometry: Geometry,
    params: SystemParams,
    coupling: &CouplingSpec,
    guess: FreeStart,
    options: &ShootingOptions,
) -> Result<ShootingOutcome> {
    geometry.validate()?;
    if geometry.gamma1 == 0.0 || geometry.gamma2 == 0.0 {
        return Err(Error::InvalidParameter("shooting needs nonzero gamma1 and gamma2".into()));
    }
    if targets.p_m == 0.0 || targets.r_m == 0.0 || !targets.p_m.is_finite() || !targets.r_m.is_finite() {
        return Err(Error::InvalidParameter("targets must be finite and nonzero".into()));
    }
    if options.unknowns[0] == options.unknowns[1] {
        return Err(Error::InvalidParameter("the two adjusted parameters must differ".into()));
    }
    let shooter = Shooter {
        geometry,
        phi_start: targets.p_m / geometry.gamma1,
        r_target: targets.r_m / geometry.gamma2,
        params,
        coupling,
        options,
    };
    let [ua, ub] = options.unknowns;
    let mut free = guess;
    let mut history = Vec::new();
    let mut r = match shooter.residual(&free) {
        Ok(r) => r,
        Err(e) => {
            return Err(Error::NoConvergence {
                iterations: 0,
                reason: format!("initial guess is not integrable: {e}"),
                residual_history: history,
            })
        }
    };
    history.push(norm(&r));

    for iter in 1..=options.max_iterations {
        if norm(&r) <= options.residual_tol {
            return finish(&shooter, free, iter - 1, history);
        }
        // forward-difference Jacobian
        let mut jac = [[0.0; 2]; 2];
        for (col, p) in [ua, ub].into_iter().enumerate() {
            let v = p.get(&free);
            let h = 1e-7 * v.abs().max(1.0);
            let mut trial = free;
            p.set(&mut trial, v + h);
            let rt = shooter.residual(&trial).map_err(|e| Error::NoConvergence {
                iterations: iter,
                reason: format!("Jacobian probe failed: {e}"),
                residual_history: history.clone(),
            })?;
            jac[0][col] = (rt[0] - r[0]) / h;
            jac[1][col] = (rt[1] - r[1]) / h;
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(Error::NoConvergence {
                iterations: iter,
                reason: "singular Jacobian: the auxiliary condition does not constrain the adjusted parameters".into(),
                residual_history: history,
            });
        }
        let da = -(jac[1][1] * r[0] - jac[0][1] * r[1]) / det;
        let db = -(-jac[1][0] * r[0] + jac[0][0] * r[1]) / det;

        let mut damping = 1.0;
        let mut accepted = None;
        for _ in 0..12 {
            let mut trial = free;
            ua.set(&mut trial, ua.get(&free) + damping * da);
            ub.set(&mut trial, ub.get(&free) + damping * db);
            if let Ok(rt) = shooter.residual(&trial) {
                if norm(&rt) < norm(&r) {
                    accepted = Some((trial, rt));
                    break;
                }
            }
            damping *= 0.5;
        }
        match accepted {
            Some((trial, rt)) => {
                free = trial;
                r = rt;
                history.push(norm(&r));
            }
            None => {
                return Err(Error::NoConvergence {
                    iterations: iter,
                    reason: "Newton step stagnated".into(),
                    residual_history: history,
                })
            }
        }
    }
    if norm(&r) <= options.residual_tol {
        return finish(&shooter, free, options.max_iterations, history);
    }
    Err(Error::NoConvergence {
        iterations: options.max_iterations,
        reason: "iteration limit reached".into(),
        residual_history: history,
    })
}

fn finish(shooter: &Shooter<'_>, free: FreeStart, iterations: usize, residual_history: Vec<f64>) -> Result<ShootingOutcome> {
    let problem = MovingBoundaryProblem::build(
        shooter.geometry,
        shooter.start(&free),
        shooter.params,
        shooter.coupling.clone(),
        shooter.options.integration,
    )?;
    Ok(ShootingOutcome { problem, start: free, iterations, residual_history })
}
