//! Direct method-of-lines solution on the mapped strip `y = x/(t+a)^(1/3)`.
//!
//! With `u = s^(-1/3) w(y, t)`, `v = s^(-1/3) z(y, t)` and `s = t + a` the
//! system becomes
//!
//! `s w_t = -d/dy [w_yy + alpha (w^2+z^2) w + lambda s^(mu+2) S/(w^2 z) - y w/3]`
//!
//! and the analogous `z` equation. Similarity solutions are its steady
//! states. Dispersion needs one condition on the left and two on the right:
//! `w` at both ends and `w_y` at the right end, taken from the profile.

use serde::{Deserialize, Serialize};

use super::band::BandMatrix;
use super::grid::{linspace, FieldGrid, Provenance};
use crate::boundary::{boundary_curves, MovingBoundaryProblem};
use crate::error::{Error, Result};
use crate::fd::unit_weights;
use crate::reduction::{CouplingSpec, SystemParams};

/// Nominal spatial order of the scheme.
pub const MOL_ORDER: usize = 2;

/// Discretisation of a direct solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MolResolution {
    /// Nodes across the strip, boundaries included.
    pub ny: usize,
    /// Upper bound on the time step.
    pub dt: f64,
    pub t_start: f64,
    pub t_end: f64,
    /// Output nodes in `x` (fixed, inside the region for all output times).
    pub nx: usize,
    /// Output times, spread uniformly over `[t_start, t_end]`.
    pub nt: usize,
}

impl Default for MolResolution {
    fn default() -> Self {
        Self { ny: 201, dt: 0.01, t_start: 0.0, t_end: 1.0, nx: 101, nt: 11 }
    }
}

impl MolResolution {
    pub fn validate(&self) -> Result<()> {
        if self.ny < 8 || self.nx < 2 {
            return Err(Error::InvalidParameter(format!(
                "direct solve needs ny >= 8 and nx >= 2, got {} and {}",
                self.ny, self.nx
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("time step must be positive, got {}", self.dt)));
        }
        if !(self.t_start.is_finite() && self.t_end.is_finite()) || self.t_end < self.t_start {
            return Err(Error::InvalidParameter(format!(
                "time window needs t_start <= t_end, got [{}, {}]",
                self.t_start, self.t_end
            )));
        }
        if self.nt == 0 || (self.t_end > self.t_start && self.nt < 2) {
            return Err(Error::InvalidParameter("a non-empty time window needs nt >= 2".into()));
        }
        Ok(())
    }

    fn output_times(&self) -> Vec<f64> {
        if self.t_end == self.t_start {
            vec![self.t_start]
        } else {
            linspace(self.t_start, self.t_end, self.nt)
        }
    }
}

/// Strip values `w`, `z` at the output times; `w[i][j]` is at `(t_nodes[i], y_nodes[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct StripSolution {
    pub y_nodes: Vec<f64>,
    pub t_nodes: Vec<f64>,
    pub w: Vec<Vec<f64>>,
    pub z: Vec<Vec<f64>>,
}

/// Result of a direct solve.
#[derive(Debug, Clone)]
pub struct DirectSolution {
    /// Fields mapped back to fixed `(x, t)` nodes.
    pub fields: FieldGrid,
    pub strip: StripSolution,
    pub steps: usize,
    pub newton_iterations: usize,
}

/// Relative L2 distance between two grids on identical nodes at time row `i`.
pub fn relative_l2_distance(a: &FieldGrid, b: &FieldGrid, i: usize) -> Result<f64> {
    if a.x_nodes != b.x_nodes || a.t_nodes != b.t_nodes {
        return Err(Error::InvalidParameter("grids must share their nodes".into()));
    }
    if i >= a.nt() {
        return Err(Error::InvalidParameter(format!("time row {i} out of range")));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for j in 0..a.nx() {
        num += (a.u[i][j] - b.u[i][j]).powi(2) + (a.v[i][j] - b.v[i][j]).powi(2);
        den += b.u[i][j].powi(2) + b.v[i][j].powi(2);
    }
    Ok((num / den).sqrt())
}

/// Solves the transformed system from the similarity trace at `t_start`,
/// with boundary data from the same trace, by Crank-Nicolson in time and
/// second-order differences in `y`.
pub fn mol_direct_solve(mbp: &MovingBoundaryProblem, resolution: &MolResolution) -> Result<DirectSolution> {
    resolution.validate()?;
    let geometry = mbp.geometry();
    let params = *mbp.params();
    params.shifted_time(resolution.t_start)?;
    let strip = Strip::new(mbp, resolution.ny)?;
    let times = resolution.output_times();

    let mut state = strip.initial.clone();
    let mut w_out = Vec::with_capacity(times.len());
    let mut z_out = Vec::with_capacity(times.len());
    let (mut steps, mut newton) = (0, 0);
    let mut t = times[0];
    for (k, &target) in times.iter().enumerate() {
        if k > 0 {
            let n = ((target - t) / resolution.dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
            let dt = (target - t) / n as f64;
            for _ in 0..n {
                newton += strip.crank_nicolson(&mut state, t, dt)?;
                t += dt;
                steps += 1;
            }
            t = target;
        }
        let (w, z) = strip.full(&state);
        w_out.push(w);
        z_out.push(z);
    }

    // fixed x nodes inside the region at every output time
    let ends = [boundary_curves(&geometry, times[0])?, boundary_curves(&geometry, times[times.len() - 1])?];
    let lo = ends[0].sigma1.max(ends[1].sigma1);
    let hi = ends[0].sigma2.min(ends[1].sigma2);
    let x_nodes = linspace(lo, hi, resolution.nx);
    let mut u = Vec::with_capacity(times.len());
    let mut v = Vec::with_capacity(times.len());
    for (i, &t) in times.iter().enumerate() {
        let s = params.shifted_time(t)?;
        let c = s.cbrt();
        let row = |f: &[f64]| -> Vec<f64> {
            x_nodes.iter().map(|&x| strip.interpolate(f, x / c) / c).collect()
        };
        u.push(row(&w_out[i]));
        v.push(row(&z_out[i]));
    }
    let fields = FieldGrid::new(x_nodes, times.clone(), u, v, Provenance::DirectNumeric)?;
    let strip_solution = StripSolution { y_nodes: strip.y.clone(), t_nodes: times, w: w_out, z: z_out };
    Ok(DirectSolution { fields, strip: strip_solution, steps, newton_iterations: newton })
}

const MAX_NEWTON: usize = 25;
/// Growth factor over the initial amplitude treated as an instability.
const BLOW_UP: f64 = 1e3;

struct Strip {
    y: Vec<f64>,
    h: f64,
    params: SystemParams,
    coupling: CouplingSpec,
    /// `[w, z]` at the left and right ends.
    left: [f64; 2],
    right: [f64; 2],
    /// `[w_y, z_y]` at the right end.
    right_slope: [f64; 2],
    /// Interior unknowns interleaved as `w_1, z_1, w_2, z_2, ...`.
    initial: Vec<f64>,
    scale: f64,
    /// One-sided third-derivative weights at node 1 on nodes 0..=4.
    d3_first: Vec<f64>,
}

impl Strip {
    fn new(mbp: &MovingBoundaryProblem, ny: usize) -> Result<Self> {
        let y = linspace(mbp.gamma1(), mbp.gamma2(), ny);
        let h = (mbp.gamma2() - mbp.gamma1()) / (ny as f64 - 1.0);
        let profile = mbp.profile();
        let mut initial = Vec::with_capacity(2 * (ny - 2));
        let mut scale: f64 = 0.0;
        for &yj in &y[1..ny - 1] {
            let s = profile.state_at(yj)?;
            initial.push(s.phi);
            initial.push(s.psi);
            scale = scale.max(s.phi.abs()).max(s.psi.abs());
        }
        let l = profile.state_at(mbp.gamma1())?;
        let r = profile.state_at(mbp.gamma2())?;
        Ok(Self {
            y,
            h,
            params: *mbp.params(),
            coupling: mbp.coupling().clone(),
            left: [l.phi, l.psi],
            right: [r.phi, r.psi],
            right_slope: [r.phi_prime, r.psi_prime],
            initial,
            scale,
            d3_first: unit_weights(&[-1, 0, 1, 2, 3], 3),
        })
    }

    fn nodes(&self) -> usize {
        self.y.len() - 1
    }

    /// Node values `0..=N+1` of both components, ghost node included.
    fn full_with_ghost(&self, x: &[f64]) -> [Vec<f64>; 2] {
        let n = self.nodes();
        let mut out = [vec![0.0; n + 2], vec![0.0; n + 2]];
        for c in 0..2 {
            out[c][0] = self.left[c];
            out[c][n] = self.right[c];
            for k in 1..n {
                out[c][k] = x[2 * (k - 1) + c];
            }
            out[c][n + 1] = out[c][n - 1] + 2.0 * self.h * self.right_slope[c];
        }
        out
    }

    fn full(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let [mut w, mut z] = self.full_with_ghost(x);
        w.pop();
        z.pop();
        (w, z)
    }

    /// Third-derivative stencil at interior node `j` as `(node, weight)`.
    fn d3(&self, j: usize) -> Vec<(usize, f64)> {
        let h3 = self.h.powi(3);
        if j == 1 {
            self.d3_first.iter().enumerate().map(|(k, w)| (k, w / h3)).collect()
        } else {
            let c = 0.5 / h3;
            vec![(j - 2, -c), (j - 1, 2.0 * c), (j + 1, -2.0 * c), (j + 2, c)]
        }
    }

    /// Nonlinear fluxes at one node and their partial derivatives
    /// `[[dG/dw, dG/dz], [dH/dw, dH/dz]]`.
    fn flux(&self, w: f64, z: f64, factor: f64, y: f64) -> Result<([f64; 2], [[f64; 2]; 2])> {
        let a = self.params.alpha;
        let r2 = w * w + z * z;
        let mut g = [a * r2 * w, a * r2 * z];
        let mut d = [[a * (3.0 * w * w + z * z), 2.0 * a * w * z], [2.0 * a * w * z, a * (w * w + 3.0 * z * z)]];
        if factor != 0.0 {
            let (s, t) = self.coupling.source_terms(w, z, y)?;
            g[0] += factor * s;
            g[1] += factor * t;
            // source partials by central differences
            for (c, v) in [w, z].into_iter().enumerate() {
                let e = 1e-6 * v.abs();
                let (wp, zp, wm, zm) = if c == 0 { (w + e, z, w - e, z) } else { (w, z + e, w, z - e) };
                let p = self.coupling.source_terms(wp, zp, y)?;
                let m = self.coupling.source_terms(wm, zm, y)?;
                d[0][c] += factor * (p.0 - m.0) / (2.0 * e);
                d[1][c] += factor * (p.1 - m.1) / (2.0 * e);
            }
        }
        Ok((g, d))
    }

    fn source_factor(&self, t: f64) -> Result<f64> {
        let s = self.params.shifted_time(t)?;
        Ok(if self.params.lambda == 0.0 { 0.0 } else { self.params.lambda * s.powf(self.params.mu + 2.0) })
    }

    /// Right-hand side `x_t = f(t, x)` and, on request, its banded Jacobian.
    fn rhs(&self, t: f64, x: &[f64], jacobian: Option<(&mut BandMatrix, f64)>) -> Result<Vec<f64>> {
        let n = self.nodes();
        let s = self.params.shifted_time(t)?;
        let factor = self.source_factor(t)?;
        let f = self.full_with_ghost(x);
        let mut g = [vec![0.0; n + 1], vec![0.0; n + 1]];
        let mut dg = vec![[[0.0; 2]; 2]; n + 1];
        for k in 0..=n {
            let (gk, dk) = self.flux(f[0][k], f[1][k], factor, self.y[k])?;
            g[0][k] = gk[0];
            g[1][k] = gk[1];
            dg[k] = dk;
        }
        let inv2h = 0.5 / self.h;
        let mut out = vec![0.0; x.len()];
        for j in 1..n {
            let d3 = self.d3(j);
            for c in 0..2 {
                let third: f64 = d3.iter().map(|&(k, w)| w * f[c][k]).sum();
                let flux = (g[c][j + 1] - g[c][j - 1]) * inv2h;
                let drift = (self.y[j + 1] * f[c][j + 1] - self.y[j - 1] * f[c][j - 1]) * inv2h / 3.0;
                out[2 * (j - 1) + c] = -(third + flux - drift) / s;
            }
        }
        if let Some((m, coef)) = jacobian {
            // m += coef * df/dx
            let col = |k: usize, c: usize| 2 * (k - 1) + c;
            let free = |k: usize| k >= 1 && k < n;
            for j in 1..n {
                for c in 0..2 {
                    let row = col(j, c);
                    let mut put = |k: usize, cc: usize, v: f64| {
                        // the ghost node n+1 moves with node n-1
                        let k = if k == n + 1 { n - 1 } else { k };
                        if free(k) {
                            m.add(row, col(k, cc), -coef * v / s);
                        }
                    };
                    for (k, w) in self.d3(j) {
                        put(k, c, w);
                    }
                    for (k, sign) in [(j + 1, 1.0), (j - 1, -1.0)] {
                        for cc in 0..2 {
                            put(k, cc, sign * inv2h * dg[k][c][cc]);
                        }
                        put(k, c, -sign * inv2h * self.y[k] / 3.0);
                    }
                }
            }
        }
        Ok(out)
    }

    /// One Crank-Nicolson step solved by Newton's method; returns the
    /// number of Newton iterations.
    fn crank_nicolson(&self, x: &mut [f64], t: f64, dt: f64) -> Result<usize> {
        let len = x.len();
        let f0 = self.rhs(t, x, None)?;
        let b: Vec<f64> = x.iter().zip(&f0).map(|(xi, fi)| xi + 0.5 * dt * fi).collect();
        let mut next = x.to_vec();
        for iter in 1..=MAX_NEWTON {
            let mut m = BandMatrix::zeros(len, 5, 7);
            for i in 0..len {
                m.add(i, i, 1.0);
            }
            let f1 = self.rhs(t + dt, &next, Some((&mut m, -0.5 * dt)))?;
            let mut delta: Vec<f64> =
                (0..len).map(|i| -(next[i] - 0.5 * dt * f1[i] - b[i])).collect();
            m.solve(&mut delta)?;
            let mut size: f64 = 0.0;
            for (xi, di) in next.iter_mut().zip(&delta) {
                *xi += di;
                size = size.max(di.abs());
            }
            let peak = next.iter().fold(0.0_f64, |p, v| p.max(v.abs()));
            if !peak.is_finite() || peak > BLOW_UP * self.scale {
                return Err(Error::TimeStepping(format!(
                    "instability at t = {}: amplitude {peak:e} with dt = {dt}, dy = {}",
                    t + dt,
                    self.h
                )));
            }
            // quadratic convergence: the remaining error is of order size^2
            if size <= 1e-10 * (1.0 + peak) {
                x.copy_from_slice(&next);
                return Ok(iter);
            }
        }
        Err(Error::TimeStepping(format!("Newton iteration did not converge at t = {}", t + dt)))
    }

    /// Cubic (Lagrange, four nearest nodes) interpolation of node values at `y`.
    fn interpolate(&self, f: &[f64], y: f64) -> f64 {
        let n = self.nodes();
        let pos = ((y - self.y[0]) / self.h).clamp(0.0, n as f64);
        let first = (pos.floor() as usize).saturating_sub(1).min(n - 3);
        let nodes: Vec<f64> = (0..4).map(|k| (first + k) as f64).collect();
        let w = crate::fd::fornberg_weights(pos, &nodes, 0).swap_remove(0);
        (0..4).map(|k| w[k] * f[first + k]).sum()
    }
}
