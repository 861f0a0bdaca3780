use super::params::SimilarityParams;
use crate::erp2::ReducedProfile;
use crate::error::Result;

/// Field values `(u, v)` at one space-time point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fields {
    pub u: f64,
    pub v: f64,
}

/// `u = (t+a)^(-1/3) Phi(x/(t+a)^(1/3))`, and likewise `v` from `Psi`.
///
/// Fails if the similarity variable falls outside the solved range.
pub fn reconstruct_fields(profile: &ReducedProfile, t: f64, x: f64) -> Result<Fields> {
    reconstruct_with(profile, &SimilarityParams::canonical(), t, x)
}

/// Reconstruction with arbitrary exponents `(m, n)`; only the canonical pair
/// yields solutions, other pairs serve as negative controls.
pub fn reconstruct_with(
    profile: &ReducedProfile,
    similarity: &SimilarityParams,
    t: f64,
    x: f64,
) -> Result<Fields> {
    let s = profile.params().shifted_time(t)?;
    let xi = x / s.powf(similarity.n_f64());
    let amp = s.powf(similarity.m_f64());
    let st = profile.state_at(xi)?;
    Ok(Fields { u: amp * st.phi, v: amp * st.psi })
}
