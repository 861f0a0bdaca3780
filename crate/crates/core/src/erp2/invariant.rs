use serde::Serialize;

use super::profile::ReducedProfile;
use super::system::ReducedState;
use crate::error::{Error, Result};
use crate::reduction::{CouplingSpec, SystemParams, GUARD_BAND};

/// Minimum number of dense-output samples used for drift monitoring.
pub const DRIFT_SAMPLES: usize = 201;

/// `Phi Psi' - Phi' Psi`.
pub fn wronskian(s: &ReducedState) -> f64 {
    s.phi * s.psi_prime - s.phi_prime * s.psi
}

/// Ermakov-type first integral `I = W^2/2 - lambda (1 + theta^2) J(theta)`.
///
/// Along solutions `(W^2/2)' = lambda W [2 theta J + (1 + theta^2) J'] / Phi^2`,
/// which is exactly the derivative of `lambda (1 + theta^2) J(theta)` since
/// `theta' = W / Phi^2`.
pub fn ermakov_invariant(state: &ReducedState, params: &SystemParams, coupling: &CouplingSpec) -> Result<f64> {
    evaluate(InvariantReading::Conserved, state, params, coupling)
}

/// Alternative readings of the printed invariant, kept for the empirical
/// comparison in [`invariant_candidates`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum InvariantReading {
    /// `W^2/2 - lambda (1 + theta^2) J`.
    Conserved,
    /// `W^2/2 + (Phi^2 + Psi)^2 / Phi^2 J`, taken literally.
    Literal,
    /// `W^2/2 + (Phi^2 + Psi^2) / Phi^2 J` without the coupling strength.
    SquaredSum,
    /// `W^2/2 + lambda (1 + theta^2) J`, opposite sign.
    SignFlipped,
}

impl InvariantReading {
    pub const ALL: [InvariantReading; 4] = [
        InvariantReading::Conserved,
        InvariantReading::Literal,
        InvariantReading::SquaredSum,
        InvariantReading::SignFlipped,
    ];

    pub fn formula(self) -> &'static str {
        match self {
            InvariantReading::Conserved => "W^2/2 - lambda (1 + theta^2) J(theta)",
            InvariantReading::Literal => "W^2/2 + (Phi^2 + Psi)^2 / Phi^2 J(theta)",
            InvariantReading::SquaredSum => "W^2/2 + (Phi^2 + Psi^2) / Phi^2 J(theta)",
            InvariantReading::SignFlipped => "W^2/2 + lambda (1 + theta^2) J(theta)",
        }
    }
}

fn evaluate(reading: InvariantReading, s: &ReducedState, params: &SystemParams, coupling: &CouplingSpec) -> Result<f64> {
    let w = wronskian(s);
    let kinetic = 0.5 * w * w;
    if reading == InvariantReading::Conserved && params.lambda == 0.0 {
        return Ok(kinetic);
    }
    if !(s.phi.abs() >= GUARD_BAND && s.psi.abs() >= GUARD_BAND) {
        return Err(Error::SingularState { xi: s.xi, phi: s.phi, psi: s.psi });
    }
    let theta = s.psi / s.phi;
    let (j, _) = coupling.eval(theta)?;
    let weight = 1.0 + theta * theta;
    Ok(match reading {
        InvariantReading::Conserved => kinetic - params.lambda * weight * j,
        InvariantReading::Literal => {
            let q = s.phi * s.phi + s.psi;
            kinetic + q * q / (s.phi * s.phi) * j
        }
        InvariantReading::SquaredSum => kinetic + weight * j,
        InvariantReading::SignFlipped => kinetic + params.lambda * weight * j,
    })
}

/// Invariant sampled along a profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantSeries {
    pub xi_samples: Vec<f64>,
    pub values: Vec<f64>,
    /// Value at the left end of the profile.
    pub reference: f64,
    /// `max |I(xi) - reference|`.
    pub max_drift: f64,
}

fn sample_points(profile: &ReducedProfile) -> Vec<f64> {
    let (lo, hi) = profile.xi_range();
    if profile.len() == 1 {
        return vec![lo];
    }
    let n = DRIFT_SAMPLES.max(profile.len());
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect()
}

fn series(profile: &ReducedProfile, reading: InvariantReading) -> Result<InvariantSeries> {
    let xi_samples = sample_points(profile);
    let values = xi_samples
        .iter()
        .map(|&xi| evaluate(reading, &profile.state_at(xi)?, profile.params(), profile.coupling()))
        .collect::<Result<Vec<_>>>()?;
    let reference = values[0];
    let max_drift = values.iter().map(|v| (v - reference).abs()).fold(0.0, f64::max);
    Ok(InvariantSeries { xi_samples, values, reference, max_drift })
}

/// Samples the conserved invariant on at least [`DRIFT_SAMPLES`] points of
/// the dense output.
pub fn invariant_drift(profile: &ReducedProfile) -> Result<InvariantSeries> {
    series(profile, InvariantReading::Conserved)
}

/// Drift of one candidate reading along a profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantCandidate {
    pub reading: InvariantReading,
    pub formula: &'static str,
    pub reference: f64,
    pub max_drift: f64,
    /// Drift divided by the spread of `W^2/2` along the profile; a conserved
    /// reading sits at round-off, a non-conserved one near unity.
    pub relative_drift: f64,
}

/// Drift of every reading in [`InvariantReading::ALL`] along the profile.
pub fn invariant_candidates(profile: &ReducedProfile) -> Result<Vec<InvariantCandidate>> {
    let xs = sample_points(profile);
    let kinetic: Vec<f64> = xs
        .iter()
        .map(|&xi| profile.state_at(xi).map(|s| 0.5 * wronskian(&s).powi(2)))
        .collect::<Result<_>>()?;
    let lo = kinetic.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = kinetic.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let spread = (hi - lo).max(f64::MIN_POSITIVE);
    InvariantReading::ALL
        .iter()
        .map(|&reading| {
            let s = series(profile, reading)?;
            Ok(InvariantCandidate {
                reading,
                formula: reading.formula(),
                reference: s.reference,
                max_drift: s.max_drift,
                relative_drift: s.max_drift / spread,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(lambda: f64) -> SystemParams {
        SystemParams::solvable(1.0, lambda, 1.0).unwrap()
    }

    #[test]
    fn proportional_amplitudes_with_zero_generator() {
        let c = 1.7;
        let s = ReducedState::new(0.2, 0.9, -0.4, c * 0.9, c * -0.4);
        let i = ermakov_invariant(&s, &params(1.0), &CouplingSpec::constant(0.0)).unwrap();
        assert!(i.abs() < 1e-15);
    }

    #[test]
    fn without_source_only_wronskian_remains() {
        let s = ReducedState::new(0.0, 1.2, 0.3, -0.7, 0.5);
        let w = 1.2 * 0.5 - 0.3 * -0.7;
        let i = ermakov_invariant(&s, &params(0.0), &CouplingSpec::sine(1.0)).unwrap();
        assert_eq!(i, 0.5 * w * w);
    }

    #[test]
    fn quadratic_closed_form() {
        // theta = 0.5, J = 0.25, (1 + theta^2) J = 0.3125
        let s = ReducedState::new(0.0, 2.0, 0.5, 1.0, -1.0);
        let w = 2.0 * -1.0 - 0.5 * 1.0;
        let i = ermakov_invariant(&s, &params(1.5), &CouplingSpec::quadratic(1.0)).unwrap();
        assert!((i - (0.5 * w * w - 1.5 * 0.3125)).abs() < 1e-15);
    }

    #[test]
    fn guard_band_applies_with_source() {
        let s = ReducedState::new(0.0, 0.0, 0.5, 1.0, -1.0);
        assert!(ermakov_invariant(&s, &params(1.0), &CouplingSpec::quadratic(1.0)).is_err());
    }
}
