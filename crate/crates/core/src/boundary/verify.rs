use serde::Serialize;

use super::problem::{boundary_curves, BoundaryConstants, BoundaryCurves, MovingBoundaryProblem};
use crate::error::{Error, Result};
use crate::fd;
use crate::reduction::{reconstruct_fields, Fields};

/// Times at which the boundary conditions are checked by default.
pub const DEFAULT_SAMPLE_TIMES: [f64; 7] = [0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0];

/// Spatial steps per region width for the one-sided stencil. Profiles built
/// by [`MovingBoundaryProblem::build`] use the same division as their step
/// bound, so stencil nodes fall on solver knots.
pub const STENCIL_DIVISIONS: f64 = 800.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Condition {
    /// Flux condition for `u` on `Sigma1`.
    FluxLeft,
    /// Flux condition for `v` on `Sigma2`.
    FluxRight,
    /// Value condition for `u` on `Sigma1`.
    ValueLeft,
    /// Value condition for `v` on `Sigma2`.
    ValueRight,
}

impl Condition {
    pub const ALL: [Condition; 4] = [Condition::FluxLeft, Condition::FluxRight, Condition::ValueLeft, Condition::ValueRight];

    pub fn label(self) -> &'static str {
        match self {
            Condition::FluxLeft => "flux u on Sigma1",
            Condition::FluxRight => "flux v on Sigma2",
            Condition::ValueLeft => "value u on Sigma1",
            Condition::ValueRight => "value v on Sigma2",
        }
    }
}

/// Both sides of every condition at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeSample {
    pub t: f64,
    pub curves: BoundaryCurves,
    pub flux_left: f64,
    pub flux_left_expected: f64,
    pub flux_right: f64,
    pub flux_right_expected: f64,
    pub u_left: f64,
    pub u_left_expected: f64,
    pub v_right: f64,
    pub v_right_expected: f64,
    /// `L_m` recovered from the measured flux: `flux * Sigma1 / Sigma1'`.
    pub l_m_measured: f64,
    pub m_m_measured: f64,
}

impl TimeSample {
    fn sides(&self, c: Condition) -> (f64, f64) {
        match c {
            Condition::FluxLeft => (self.flux_left, self.flux_left_expected),
            Condition::FluxRight => (self.flux_right, self.flux_right_expected),
            Condition::ValueLeft => (self.u_left, self.u_left_expected),
            Condition::ValueRight => (self.v_right, self.v_right_expected),
        }
    }

    pub fn relative_residual(&self, c: Condition) -> f64 {
        let (lhs, rhs) = self.sides(c);
        relative(lhs, rhs)
    }
}

fn relative(lhs: f64, rhs: f64) -> f64 {
    let d = (lhs - rhs).abs();
    if rhs == 0.0 {
        d
    } else {
        d / rhs.abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionResidual {
    pub condition: Condition,
    pub max_relative: f64,
}

/// Outcome of checking all four boundary conditions at a set of times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryReport {
    pub constants: BoundaryConstants,
    pub samples: Vec<TimeSample>,
    pub conditions: [ConditionResidual; 4],
    /// `(max - min) / |mean|` of the measured `L_m(t)`.
    pub l_m_spread: f64,
    pub m_m_spread: f64,
}

impl BoundaryReport {
    pub fn max_relative(&self) -> f64 {
        self.conditions.iter().map(|c| c.max_relative).fold(0.0, f64::max)
    }

    pub fn residual(&self, c: Condition) -> f64 {
        self.conditions.iter().find(|r| r.condition == c).map_or(f64::NAN, |r| r.max_relative)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_relative() <= tol
    }
}

pub(crate) fn spread(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    if mean == 0.0 {
        max - min
    } else {
        (max - min) / mean.abs()
    }
}

fn fields(mbp: &MovingBoundaryProblem, t: f64, x: f64) -> Result<Fields> {
    reconstruct_fields(mbp.profile(), t, x).map_err(|e| match e {
        Error::OutOfDomain { .. } => Error::StencilOutOfDomain(x),
        other => other,
    })
}

/// Nodes of the one-sided second-derivative stencil (order 8).
const STENCIL_POINTS: usize = 10;

fn one_sided(mbp: &MovingBoundaryProblem, t: f64, x0: f64, h: f64, w: &[f64]) -> Result<(f64, f64)> {
    let mut us = vec![0.0; w.len()];
    let mut vs = vec![0.0; w.len()];
    for k in 0..w.len() {
        let f = fields(mbp, t, x0 + k as f64 * h)?;
        us[k] = f.u;
        vs[k] = f.v;
    }
    Ok((fd::apply(w, &us, h, 2), fd::apply(w, &vs, h, 2)))
}

/// One-sided second derivatives of both fields at `x0`, stepping `h`
/// (signed) into the region.
fn second_derivatives(mbp: &MovingBoundaryProblem, t: f64, x0: f64, h: f64) -> Result<(f64, f64)> {
    let offsets: Vec<i32> = (0..STENCIL_POINTS as i32).collect();
    let w = fd::unit_weights(&offsets, 2);
    one_sided(mbp, t, x0, h, &w)
}

/// Left sides of the two flux conditions at time `t`.
pub(crate) fn measured_fluxes(mbp: &MovingBoundaryProblem, t: f64, curves: &BoundaryCurves) -> Result<(f64, f64, Fields, Fields)> {
    let p = mbp.params();
    let s = t + mbp.a();
    let h = (mbp.gamma2() - mbp.gamma1()) * s.cbrt() / STENCIL_DIVISIONS;
    let modulation = p.lambda * s.powf(p.mu);

    let left = fields(mbp, t, curves.sigma1)?;
    let (u_xx, _) = second_derivatives(mbp, t, curves.sigma1, h)?;
    let right = fields(mbp, t, curves.sigma2)?;
    let (_, v_xx) = second_derivatives(mbp, t, curves.sigma2, -h)?;

    let mut flux_left = u_xx + p.alpha * (left.u * left.u + left.v * left.v) * left.u;
    let mut flux_right = v_xx + p.alpha * (right.u * right.u + right.v * right.v) * right.v;
    if p.lambda != 0.0 {
        let (sl, _) = mbp.coupling().source_terms(left.u, left.v, curves.sigma1)?;
        let (_, tr) = mbp.coupling().source_terms(right.u, right.v, curves.sigma2)?;
        flux_left += modulation * sl;
        flux_right += modulation * tr;
    }
    Ok((flux_left, flux_right, left, right))
}

/// Evaluates every boundary condition at each time from the reconstructed
/// fields, with second derivatives taken by finite differences.
pub fn verify_boundary_conditions(
    mbp: &MovingBoundaryProblem,
    constants: &BoundaryConstants,
    times: &[f64],
) -> Result<BoundaryReport> {
    if times.is_empty() {
        return Err(Error::InvalidParameter("no sample times given".into()));
    }
    if let Some(&t) = times.iter().find(|&&t| !(t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidParameter(format!("boundary conditions hold for t > 0, got t = {t}")));
    }
    if mbp.gamma1() == 0.0 || mbp.gamma2() == 0.0 {
        return Err(Error::InvalidParameter("a boundary through x = 0 has no power-law flux".into()));
    }
    let c = constants;
    let mut samples = Vec::with_capacity(times.len());
    for &t in times {
        let curves = boundary_curves(&mbp.geometry(), t)?;
        let (flux_left, flux_right, left, right) = measured_fluxes(mbp, t, &curves)?;
        let pow = |base: f64, e: i32| base.powi(e);
        samples.push(TimeSample {
            t,
            curves,
            flux_left,
            flux_left_expected: c.l_m * pow(curves.sigma1, c.i) * curves.sigma1_dot,
            flux_right,
            flux_right_expected: c.m_m * pow(curves.sigma2, c.i) * curves.sigma2_dot,
            u_left: left.u,
            u_left_expected: c.p_m * pow(curves.sigma1, c.j),
            v_right: right.v,
            v_right_expected: c.r_m * pow(curves.sigma2, c.l),
            l_m_measured: flux_left * curves.sigma1 / curves.sigma1_dot,
            m_m_measured: flux_right * curves.sigma2 / curves.sigma2_dot,
        });
    }
    let conditions = Condition::ALL.map(|condition| ConditionResidual {
        condition,
        max_relative: samples.iter().map(|s| s.relative_residual(condition)).fold(0.0, f64::max),
    });
    let l: Vec<f64> = samples.iter().map(|s| s.l_m_measured).collect();
    let m: Vec<f64> = samples.iter().map(|s| s.m_m_measured).collect();
    Ok(BoundaryReport {
        constants: *constants,
        samples,
        conditions,
        l_m_spread: spread(&l),
        m_m_spread: spread(&m),
    })
}

/// Power-law exponents recovered by log-log regression against `|Sigma|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentFit {
    /// From `flux / Sigma1'` on the left boundary.
    pub i_left: f64,
    /// From `flux / Sigma2'` on the right boundary.
    pub i_right: f64,
    pub j: f64,
    pub l: f64,
}

/// Least-squares slope of `ln|y|` against `ln|x|`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.abs().ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.abs().ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// `count` logarithmically spaced times in `[t_lo, t_hi]`.
pub fn log_spaced_times(t_lo: f64, t_hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (t_lo.ln(), t_hi.ln());
    (0..count).map(|k| (a + (b - a) * k as f64 / (count - 1).max(1) as f64).exp()).collect()
}

/// Regresses the measured boundary data over `times` to recover the
/// exponents of the power laws, independently of their assigned values.
pub fn fit_boundary_exponents(mbp: &MovingBoundaryProblem, times: &[f64]) -> Result<ExponentFit> {
    if times.len() < 2 {
        return Err(Error::InvalidParameter("regression needs at least two times".into()));
    }
    let mut s1 = Vec::new();
    let mut s2 = Vec::new();
    let (mut fl, mut fr, mut ul, mut vr) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for &t in times {
        let c = boundary_curves(&mbp.geometry(), t)?;
        let (flux_left, flux_right, left, right) = measured_fluxes(mbp, t, &c)?;
        s1.push(c.sigma1);
        s2.push(c.sigma2);
        fl.push(flux_left / c.sigma1_dot);
        fr.push(flux_right / c.sigma2_dot);
        ul.push(left.u);
        vr.push(right.v);
    }
    Ok(ExponentFit {
        i_left: log_log_slope(&s1, &fl),
        i_right: log_log_slope(&s2, &fr),
        j: log_log_slope(&s1, &ul),
        l: log_log_slope(&s2, &vr),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_exact_power_law() {
        let x = [0.5, 1.0, 2.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powi(-1)).collect();
        assert!((log_log_slope(&x, &y) + 1.0).abs() < 1e-14);
    }

    #[test]
    fn spread_is_relative() {
        assert!((spread(&[1.0, 1.1, 0.9]) - 0.2).abs() < 1e-14);
        assert_eq!(spread(&[2.0; 5]), 0.0);
    }

    #[test]
    fn log_spacing_hits_both_ends() {
        let t = log_spaced_times(0.1, 10.0, 5);
        assert!((t[0] - 0.1).abs() < 1e-15 && (t[4] - 10.0).abs() < 1e-13);
        assert!((t[2] - 1.0).abs() < 1e-14);
    }
}
