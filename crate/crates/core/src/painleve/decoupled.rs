use serde::Serialize;

use crate::error::{Error, Result};
use crate::erp2::ReducedState;
use crate::ode::{self, DenseTrajectory, StepControl};
use crate::reduction::{CouplingSpec, SystemParams, GUARD_BAND};

/// How the second source function of the decoupled specialization is read.
///
/// With `S = -theta / 3` the first equation gains `+lambda / (3 Phi^3)`. The
/// second source can be read as `-1 / (3 theta)` (symmetric under
/// `Phi <-> Psi`, giving `+lambda / (3 Psi^3)`) or literally as `-theta / 3`
/// (giving `+lambda / (3 Psi Phi^2)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum SourceReading {
    #[default]
    Symmetric,
    AsPrinted,
}

/// `(Phi'', Psi'')` of the decoupled Ermakov-Painleve II system.
pub fn decoupled_erp2_rhs(state: &ReducedState, params: &SystemParams, reading: SourceReading) -> Result<(f64, f64)> {
    let ReducedState { xi, phi, psi, .. } = *state;
    if !(phi.abs() >= GUARD_BAND && psi.abs() >= GUARD_BAND) {
        return Err(Error::SingularState { xi, phi, psi });
    }
    let r2 = phi * phi + psi * psi;
    let mut phi_dd = xi * phi / 3.0 - params.alpha * r2 * phi;
    let mut psi_dd = xi * psi / 3.0 - params.alpha * r2 * psi;
    let l = params.lambda;
    if l != 0.0 {
        phi_dd += l / (3.0 * phi * phi * phi);
        psi_dd += match reading {
            SourceReading::Symmetric => l / (3.0 * psi * psi * psi),
            SourceReading::AsPrinted => l / (3.0 * psi * phi * phi),
        };
    }
    Ok((phi_dd, psi_dd))
}

/// Hamiltonian coupling reproducing the symmetric reading:
/// `J = -1/6 - 1/(6 theta^2)`, so `S = -theta/3` and `T = -1/(3 theta)`.
pub fn decoupled_coupling() -> CouplingSpec {
    CouplingSpec::custom(
        "decoupled",
        |t: f64| -1.0 / 6.0 - 1.0 / (6.0 * t * t),
        |t: f64| 1.0 / (3.0 * t * t * t),
    )
}

/// Integrates the decoupled system; components are `(Phi, Phi', Psi, Psi')`.
pub fn integrate_decoupled(
    initial: ReducedState,
    xi_end: f64,
    params: &SystemParams,
    reading: SourceReading,
    tol: f64,
) -> Result<DenseTrajectory> {
    if !(1e-14..=1e-6).contains(&tol) {
        return Err(Error::InvalidParameter(format!("tol must lie in [1e-14, 1e-6], got {tol:e}")));
    }
    let f = |x: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
        let (a, b) = decoupled_erp2_rhs(&ReducedState::new(x, y[0], y[1], y[2], y[3]), params, reading)?;
        dy[0] = y[1];
        dy[1] = a;
        dy[2] = y[3];
        dy[3] = b;
        Ok(())
    };
    let y0 = [initial.phi, initial.phi_prime, initial.psi, initial.psi_prime];
    let control = StepControl::new(tol).with_blowup(1e8);
    let knots = ode::integrate(&ode::DORMAND_PRINCE_54, f, initial.xi, &y0, xi_end, &control).map_err(|p| match p.halt {
        ode::Halt::Rhs { error, .. } => error,
        ode::Halt::Underflow { x, h } => Error::StepSizeUnderflow { x, h },
        ode::Halt::Blowup { x } => Error::StepSizeUnderflow { x, h: 0.0 },
        ode::Halt::TooManySteps(n) => Error::TooManySteps(n),
    })?;
    Ok(DenseTrajectory::from_knots(knots))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::erp2::rhs;

    #[test]
    fn unit_state_example() {
        let p = SystemParams::solvable(1.0, 3.0, 1.0).unwrap();
        let s = ReducedState::new(0.0, 1.0, 0.0, 1.0, 0.0);
        for reading in [SourceReading::Symmetric, SourceReading::AsPrinted] {
            let (a, b) = decoupled_erp2_rhs(&s, &p, reading).unwrap();
            assert!((a + 1.0).abs() < 1e-15 && (b + 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn no_source_is_the_cubic_system() {
        let p = SystemParams::solvable(0.7, 0.0, 1.0).unwrap();
        let s = ReducedState::new(0.4, 1.2, 0.1, -0.6, 0.3);
        let a = decoupled_erp2_rhs(&s, &p, SourceReading::Symmetric).unwrap();
        let b = rhs(&s, &p, &CouplingSpec::constant(1.0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn matches_hamiltonian_coupling() {
        let p = SystemParams::solvable(0.5, 1.3, 1.0).unwrap();
        let c = decoupled_coupling();
        for (phi, psi) in [(1.0, 0.5), (-0.7, 1.4), (2.0, -0.3)] {
            let s = ReducedState::new(0.8, phi, 0.0, psi, 0.0);
            let (a, b) = decoupled_erp2_rhs(&s, &p, SourceReading::Symmetric).unwrap();
            let (ha, hb) = rhs(&s, &p, &c).unwrap();
            assert!((a - ha).abs() <= 1e-14 * a.abs().max(1.0), "{a} {ha}");
            assert!((b - hb).abs() <= 1e-14 * b.abs().max(1.0), "{b} {hb}");
        }
    }

    #[test]
    fn symmetric_data_stays_symmetric() {
        let p = SystemParams::solvable(0.5, 1.0, 1.0).unwrap();
        let init = ReducedState::new(0.0, 0.9, 0.1, 0.9, 0.1);
        let traj = integrate_decoupled(init, 2.0, &p, SourceReading::Symmetric, 1e-12).unwrap();
        for k in traj.knots() {
            assert!((k.y[0] - k.y[2]).abs() < 1e-10);
        }
    }
}
