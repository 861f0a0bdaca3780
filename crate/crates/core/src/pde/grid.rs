use serde::{Deserialize, Serialize};

use crate::boundary::{boundary_curves, Geometry};
use crate::erp2::ReducedProfile;
use crate::error::{Error, Result};
use crate::reduction::{reconstruct_with, SimilarityParams};

/// Origin of the field values on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Similarity,
    DirectNumeric,
}

/// Fields `u`, `v` sampled on a tensor grid; `u[i][j]` is at `(t_nodes[i], x_nodes[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub x_nodes: Vec<f64>,
    pub t_nodes: Vec<f64>,
    pub u: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub provenance: Provenance,
}

/// Layout of a residual grid over a moving region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub nx: usize,
    pub nt: usize,
    pub t_start: f64,
    pub t_end: f64,
    /// Distance kept from both boundaries, in units of the widest centred
    /// stencil reach.
    pub inset_stencils: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { nx: 400, nt: 100, t_start: 0.5, t_end: 2.0, inset_stencils: 2.0 }
    }
}

/// Reach of the widest centred stencil used by the residual, in grid steps.
pub(crate) const STENCIL_REACH: usize = 4;

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nx < 4 * STENCIL_REACH || self.nt < 4 * STENCIL_REACH {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least {} nodes per direction, got {}x{}",
                4 * STENCIL_REACH,
                self.nx,
                self.nt
            )));
        }
        if !(self.t_start.is_finite() && self.t_end.is_finite()) || self.t_start >= self.t_end {
            return Err(Error::InvalidParameter(format!(
                "time window needs t_start < t_end, got [{}, {}]",
                self.t_start, self.t_end
            )));
        }
        if !(self.inset_stencils >= 0.0 && self.inset_stencils.is_finite()) {
            return Err(Error::InvalidParameter("inset must be non-negative".into()));
        }
        Ok(())
    }

    pub fn t_nodes(&self) -> Vec<f64> {
        linspace(self.t_start, self.t_end, self.nt)
    }

    /// Fixed `x` nodes lying inside the region at every time of the window,
    /// inset from its narrowest extent.
    pub fn x_nodes(&self, geometry: &Geometry) -> Result<Vec<f64>> {
        self.validate()?;
        geometry.validate()?;
        let ends = [boundary_curves(geometry, self.t_start)?, boundary_curves(geometry, self.t_end)?];
        let lo = ends[0].sigma1.max(ends[1].sigma1);
        let hi = ends[0].sigma2.min(ends[1].sigma2);
        // nx nodes plus the inset on both sides at the same spacing
        let pad = self.inset_stencils * STENCIL_REACH as f64;
        let dx = (hi - lo) / (self.nx as f64 - 1.0 + 2.0 * pad);
        if !(hi > lo) {
            return Err(Error::InvalidParameter(format!(
                "the region has no common x-interval over [{}, {}]",
                self.t_start, self.t_end
            )));
        }
        Ok(linspace(lo + pad * dx, hi - pad * dx, self.nx))
    }
}

pub(crate) fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let h = (b - a) / (n as f64 - 1.0);
    (0..n).map(|k| if k + 1 == n { b } else { a + k as f64 * h }).collect()
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite()) && v.windows(2).all(|w| w[0] < w[1])
}

fn uniform_step(v: &[f64]) -> Option<f64> {
    let h = (v[v.len() - 1] - v[0]) / (v.len() as f64 - 1.0);
    v.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h).then_some(h)
}

impl FieldGrid {
    pub fn new(
        x_nodes: Vec<f64>,
        t_nodes: Vec<f64>,
        u: Vec<Vec<f64>>,
        v: Vec<Vec<f64>>,
        provenance: Provenance,
    ) -> Result<Self> {
        if !strictly_increasing(&x_nodes) || !strictly_increasing(&t_nodes) {
            return Err(Error::InvalidParameter("grid nodes must be finite and strictly increasing".into()));
        }
        let shape_ok = |m: &Vec<Vec<f64>>| m.len() == t_nodes.len() && m.iter().all(|r| r.len() == x_nodes.len());
        if !shape_ok(&u) || !shape_ok(&v) {
            return Err(Error::InvalidParameter(format!(
                "field matrices must be {} x {}",
                t_nodes.len(),
                x_nodes.len()
            )));
        }
        Ok(Self { x_nodes, t_nodes, u, v, provenance })
    }

    /// Samples `u = (t+a)^m Phi(x/(t+a)^n)` and the analogous `v` on the grid
    /// described by `spec` inside `geometry`.
    pub fn from_similarity(
        profile: &ReducedProfile,
        similarity: &SimilarityParams,
        geometry: &Geometry,
        spec: &GridSpec,
    ) -> Result<Self> {
        let x_nodes = spec.x_nodes(geometry)?;
        let t_nodes = spec.t_nodes();
        Self::sample(profile, similarity, x_nodes, t_nodes)
    }

    /// Samples similarity fields at arbitrary nodes.
    pub fn sample(
        profile: &ReducedProfile,
        similarity: &SimilarityParams,
        x_nodes: Vec<f64>,
        t_nodes: Vec<f64>,
    ) -> Result<Self> {
        let mut u = Vec::with_capacity(t_nodes.len());
        let mut v = Vec::with_capacity(t_nodes.len());
        for &t in &t_nodes {
            let mut ur = Vec::with_capacity(x_nodes.len());
            let mut vr = Vec::with_capacity(x_nodes.len());
            for &x in &x_nodes {
                let f = reconstruct_with(profile, similarity, t, x)?;
                ur.push(f.u);
                vr.push(f.v);
            }
            u.push(ur);
            v.push(vr);
        }
        Self::new(x_nodes, t_nodes, u, v, Provenance::Similarity)
    }

    pub fn nx(&self) -> usize {
        self.x_nodes.len()
    }

    pub fn nt(&self) -> usize {
        self.t_nodes.len()
    }

    /// Uniform spacings `(dx, dt)`; fails on non-uniform nodes.
    pub fn spacing(&self) -> Result<(f64, f64)> {
        match (uniform_step(&self.x_nodes), uniform_step(&self.t_nodes)) {
            (Some(dx), Some(dt)) => Ok((dx, dt)),
            _ => Err(Error::InvalidParameter("finite differences need uniformly spaced nodes".into())),
        }
    }

    /// Checks `Sigma1(t) <= x <= Sigma2(t)` for every node.
    pub fn check_inside(&self, geometry: &Geometry) -> Result<()> {
        let (x0, x1) = (self.x_nodes[0], self.x_nodes[self.nx() - 1]);
        for &t in &self.t_nodes {
            let c = boundary_curves(geometry, t)?;
            if x0 < c.sigma1 || x1 > c.sigma2 {
                return Err(Error::InvalidParameter(format!(
                    "grid [{x0}, {x1}] leaves the region [{}, {}] at t = {t}",
                    c.sigma1, c.sigma2
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_sits_inside_region() {
        let g = Geometry::new(0.5, 1.5, 1.0).unwrap();
        let spec = GridSpec::default();
        let x = spec.x_nodes(&g).unwrap();
        assert_eq!(x.len(), 400);
        let lo = 0.5 * 3f64.cbrt();
        let hi = 1.5 * 1.5f64.cbrt();
        let dx = x[1] - x[0];
        assert!((x[0] - lo - 8.0 * dx).abs() < 1e-12);
        assert!((hi - x[399] - 8.0 * dx).abs() < 1e-12);
        let t = spec.t_nodes();
        let z = vec![vec![0.0; 400]; 100];
        let grid = FieldGrid::new(x, t, z.clone(), z, Provenance::Similarity).unwrap();
        grid.check_inside(&g).unwrap();
        let (gx, gt) = grid.spacing().unwrap();
        assert!((gx - dx).abs() < 1e-15 && (gt - 1.5 / 99.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_shapes_and_order() {
        let x = vec![0.0, 1.0, 2.0];
        let t = vec![0.0, 1.0];
        let m = vec![vec![0.0; 3]; 2];
        assert!(FieldGrid::new(x.clone(), t.clone(), m.clone(), vec![vec![0.0; 2]; 2], Provenance::Similarity).is_err());
        assert!(FieldGrid::new(vec![0.0, 2.0, 1.0], t, m.clone(), m, Provenance::Similarity).is_err());
    }

    #[test]
    fn narrow_region_has_no_common_interval() {
        let g = Geometry::new(1.0, 1.01, 1.0).unwrap();
        assert!(GridSpec::default().x_nodes(&g).is_err());
    }
}
