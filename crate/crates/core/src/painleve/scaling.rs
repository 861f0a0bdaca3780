use serde::Serialize;

use super::solution::Sigma;
use crate::erp2::ReducedProfile;
use crate::error::{Error, Result};
use crate::reduction::SystemParams;

/// Constants of `Phi(xi) = amplitude * w(scale * xi)` taking the
/// single-component reduced equation `Phi'' = xi Phi / 3 - alpha Phi^3` to
/// `w'' = sigma 2 w^3 + z w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PiiScaling {
    pub amplitude: f64,
    /// Always true: the explicit sign absorbs what would otherwise be an
    /// imaginary amplitude for `alpha > 0`.
    pub amplitude_is_real: bool,
    pub scale: f64,
    pub sigma: Sigma,
}

impl PiiScaling {
    /// Canonical variable for a reduced coordinate.
    pub fn z(&self, xi: f64) -> f64 {
        self.scale * xi
    }

    pub fn xi(&self, z: f64) -> f64 {
        z / self.scale
    }

    /// `(w, w', w'')` at `z` from `(Phi, Phi', Phi'')` at the matching `xi`.
    pub fn to_canonical(&self, phi: f64, phi_prime: f64, phi_second: f64) -> (f64, f64, f64) {
        let (a, b) = (self.amplitude, self.scale);
        (phi / a, phi_prime / (a * b), phi_second / (a * b * b))
    }
}

/// Scaling constants for the pure cubic case `lambda = 0`, `Psi = 0`.
pub fn map_reduced_to_pii(params: &SystemParams) -> Result<PiiScaling> {
    if params.lambda != 0.0 {
        return Err(Error::InvalidParameter(format!(
            "the canonical map needs lambda = 0, got {}",
            params.lambda
        )));
    }
    if params.alpha == 0.0 || !params.alpha.is_finite() {
        return Err(Error::InvalidParameter("alpha = 0 admits no cubic normalisation".into()));
    }
    let scale = 3f64.powf(-1.0 / 3.0);
    Ok(PiiScaling {
        amplitude: (2.0 * scale * scale / params.alpha.abs()).sqrt(),
        amplitude_is_real: true,
        scale,
        sigma: Sigma::from_sign(-params.alpha),
    })
}

/// Canonical residual `|w'' - sigma 2 w^3 - z w|` of a single-component
/// profile mapped through `scaling`, at canonical points `zs`.
pub fn mapped_residual(profile: &ReducedProfile, scaling: &PiiScaling, zs: &[f64]) -> Result<f64> {
    let s = scaling.sigma.value();
    let mut worst = 0.0f64;
    for &z in zs {
        let [phi, phi_p, phi_pp, _] = profile.derivatives(0, scaling.xi(z))?;
        let (w, _, w2) = scaling.to_canonical(phi, phi_p, phi_pp);
        worst = worst.max((w2 - 2.0 * s * w * w * w - z * w).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn focusing_sign_for_negative_alpha() {
        let p = SystemParams::solvable(-2.0, 0.0, 1.0).unwrap();
        let m = map_reduced_to_pii(&p).unwrap();
        let c = 3f64.powf(-1.0 / 3.0);
        assert_eq!(m.sigma, Sigma::Plus);
        assert!((m.scale - c).abs() < 1e-15);
        assert!((m.amplitude - c).abs() < 1e-15);
    }

    #[test]
    fn degenerate_alpha_and_nonzero_lambda_are_refused() {
        for (alpha, lambda) in [(0.0, 0.0), (1.0, 0.5)] {
            let p = SystemParams::solvable(alpha, lambda, 1.0).unwrap();
            assert!(map_reduced_to_pii(&p).is_err());
        }
    }

    #[test]
    fn positive_alpha_maps_to_defocusing_sign() {
        let p = SystemParams::solvable(3.0, 0.0, 1.0).unwrap();
        assert_eq!(map_reduced_to_pii(&p).unwrap().sigma, Sigma::Minus);
    }
}
