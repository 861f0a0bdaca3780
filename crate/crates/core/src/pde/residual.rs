use serde::Serialize;

use super::grid::FieldGrid;
use crate::error::{Error, Result};
use crate::fd::DiffOperator;
use crate::reduction::{CouplingSpec, SystemParams, Term};

/// Accuracy of the centred stencils in the interior.
pub const INTERIOR_ORDER: usize = 4;
/// Accuracy of the one-sided closures at grid edges.
pub const EDGE_ORDER: usize = 2;
/// Accuracy of the comparison stencils behind the truncation estimate.
const REFERENCE_ORDER: usize = 6;

/// Selects which terms of the system enter the residual.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TermMask {
    pub time_derivative: bool,
    pub dispersion: bool,
    pub cubic: bool,
    pub source: bool,
}

impl TermMask {
    pub const ALL: Self = Self { time_derivative: true, dispersion: true, cubic: true, source: true };

    /// Every term except `term`.
    pub fn without(term: Term) -> Self {
        let mut m = Self::ALL;
        match term {
            Term::TimeDerivative => m.time_derivative = false,
            Term::Dispersion => m.dispersion = false,
            Term::Cubic => m.cubic = false,
            Term::ModulatedSource => m.source = false,
        }
        m
    }
}

impl Default for TermMask {
    fn default() -> Self {
        Self::ALL
    }
}

/// Spacing and stencil layout of a residual evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridMeta {
    pub nx: usize,
    pub nt: usize,
    pub dx: f64,
    pub dt: f64,
    pub interior_order: usize,
    pub edge_order: usize,
    /// Columns dropped from the norms at each `x` edge.
    pub edge_columns: usize,
    /// Rows dropped from the norms at each `t` edge.
    pub edge_rows: usize,
    /// Largest difference between the residual and its higher-order counterpart.
    pub truncation_estimate: f64,
}

/// Norms of the residuals of both equations over the grid interior.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub per_equation_max: [f64; 2],
    pub per_equation_l2: [f64; 2],
    /// `(t, x)` of each maximum.
    pub max_location: [(f64, f64); 2],
    pub grid_meta: GridMeta,
    pub mask: TermMask,
    pub tolerance: f64,
    pub pass: bool,
    /// Pointwise residuals, `[equation][t row][x column]`, including edges.
    #[serde(skip)]
    pub residual: [Vec<Vec<f64>>; 2],
}

impl ResidualReport {
    pub fn max(&self) -> f64 {
        self.per_equation_max[0].max(self.per_equation_max[1])
    }

    /// True if `(row, column)` enters the norms.
    pub fn is_interior(&self, row: usize, column: usize) -> bool {
        let m = &self.grid_meta;
        row >= m.edge_rows && row + m.edge_rows < m.nt && column >= m.edge_columns && column + m.edge_columns < m.nx
    }
}

struct Operators {
    dt: DiffOperator,
    dx: DiffOperator,
    dxxx: DiffOperator,
}

impl Operators {
    fn new(nt: usize, nx: usize, accuracy: usize) -> Self {
        Self {
            dt: DiffOperator::new(nt, 1, accuracy, EDGE_ORDER),
            dx: DiffOperator::new(nx, 1, accuracy, EDGE_ORDER),
            dxxx: DiffOperator::new(nx, 3, accuracy, EDGE_ORDER),
        }
    }

    fn edge_rows(&self) -> usize {
        self.dt.reach()
    }

    fn edge_columns(&self) -> usize {
        self.dx.reach().max(self.dxxx.reach())
    }
}

/// Residual of both equations at every node, for one stencil accuracy.
fn evaluate(
    grid: &FieldGrid,
    params: &SystemParams,
    coupling: &CouplingSpec,
    mask: TermMask,
    ops: &Operators,
    dx: f64,
    dt: f64,
) -> Result<[Vec<Vec<f64>>; 2]> {
    let (nt, nx) = (grid.nt(), grid.nx());
    let mut res = [vec![vec![0.0; nx]; nt], vec![vec![0.0; nx]; nt]];

    if mask.time_derivative {
        let mut col = vec![0.0; nt];
        for (field, r) in [&grid.u, &grid.v].into_iter().zip(res.iter_mut()) {
            for j in 0..nx {
                for i in 0..nt {
                    col[i] = field[i][j];
                }
                for i in 0..nt {
                    r[i][j] += ops.dt.at(&col, dt, i);
                }
            }
        }
    }

    let with_source = mask.source && params.lambda != 0.0;
    let mut flux = [vec![0.0; nx], vec![0.0; nx]];
    for i in 0..nt {
        let (u, v) = (&grid.u[i], &grid.v[i]);
        let t = grid.t_nodes[i];
        if mask.dispersion {
            for j in 0..nx {
                res[0][i][j] += ops.dxxx.at(u, dx, j);
                res[1][i][j] += ops.dxxx.at(v, dx, j);
            }
        }
        if mask.cubic || with_source {
            let modulation = params.lambda * params.shifted_time(t)?.powf(params.mu);
            for j in 0..nx {
                let (uj, vj) = (u[j], v[j]);
                let (mut f1, mut f2) = (0.0, 0.0);
                if mask.cubic {
                    let r2 = uj * uj + vj * vj;
                    f1 += params.alpha * r2 * uj;
                    f2 += params.alpha * r2 * vj;
                }
                if with_source {
                    let (s, tt) = coupling
                        .source_terms(uj, vj, grid.x_nodes[j])
                        .map_err(|e| match e {
                            Error::SingularState { phi, psi, .. } => Error::InvalidParameter(format!(
                                "source terms undefined at (t, x) = ({t}, {}) where u = {phi}, v = {psi}",
                                grid.x_nodes[j]
                            )),
                            other => other,
                        })?;
                    f1 += modulation * s;
                    f2 += modulation * tt;
                }
                flux[0][j] = f1;
                flux[1][j] = f2;
            }
            for k in 0..2 {
                for j in 0..nx {
                    res[k][i][j] += ops.dx.at(&flux[k], dx, j);
                }
            }
        }
    }
    Ok(res)
}

/// Residual of the full system on `grid`, all terms included.
///
/// Derivatives use centred differences of order 4 (one-sided order 2 at the
/// edges, whose rows and columns are excluded from the norms). The nonlinear
/// fluxes are formed pointwise in closed form and then differenced.
/// Fails with [`Error::GridTooCoarse`] when the difference to an order-6
/// evaluation exceeds `tolerance / 10`.
pub fn pde_residual(
    grid: &FieldGrid,
    params: &SystemParams,
    coupling: &CouplingSpec,
    tolerance: f64,
) -> Result<ResidualReport> {
    pde_residual_masked(grid, params, coupling, tolerance, TermMask::ALL)
}

/// [`pde_residual`] with a subset of the terms.
pub fn pde_residual_masked(
    grid: &FieldGrid,
    params: &SystemParams,
    coupling: &CouplingSpec,
    tolerance: f64,
    mask: TermMask,
) -> Result<ResidualReport> {
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tolerance}")));
    }
    params.validate()?;
    let (dx, dt) = grid.spacing()?;
    let (nt, nx) = (grid.nt(), grid.nx());
    if nt < 2 * (REFERENCE_ORDER / 2 + 1) + 1 || nx < 2 * (REFERENCE_ORDER / 2 + 2) + 1 {
        return Err(Error::InvalidParameter(format!("grid {nt}x{nx} is too small for the stencils")));
    }

    let ops = Operators::new(nt, nx, INTERIOR_ORDER);
    let reference = Operators::new(nt, nx, REFERENCE_ORDER);
    let residual = evaluate(grid, params, coupling, mask, &ops, dx, dt)?;
    let fine = evaluate(grid, params, coupling, mask, &reference, dx, dt)?;

    let (er, ec) = (ops.edge_rows(), ops.edge_columns());
    let (rr, rc) = (reference.edge_rows(), reference.edge_columns());
    let mut truncation = 0.0f64;
    for i in rr..nt - rr {
        for j in rc..nx - rc {
            for k in 0..2 {
                truncation = truncation.max((residual[k][i][j] - fine[k][i][j]).abs());
            }
        }
    }

    let mut max = [0.0f64; 2];
    let mut loc = [(grid.t_nodes[er], grid.x_nodes[ec]); 2];
    let mut sq = [0.0f64; 2];
    for i in er..nt - er {
        for j in ec..nx - ec {
            for k in 0..2 {
                let r = residual[k][i][j];
                if !r.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "non-finite residual at (t, x) = ({}, {})",
                        grid.t_nodes[i], grid.x_nodes[j]
                    )));
                }
                if r.abs() > max[k] {
                    max[k] = r.abs();
                    loc[k] = (grid.t_nodes[i], grid.x_nodes[j]);
                }
                sq[k] += r * r;
            }
        }
    }
    let l2 = sq.map(|s| (s * dx * dt).sqrt());

    let limit = tolerance / 10.0;
    if truncation > limit {
        return Err(Error::GridTooCoarse { estimate: truncation, limit });
    }
    Ok(ResidualReport {
        per_equation_max: max,
        per_equation_l2: l2,
        max_location: loc,
        grid_meta: GridMeta {
            nx,
            nt,
            dx,
            dt,
            interior_order: INTERIOR_ORDER,
            edge_order: EDGE_ORDER,
            edge_columns: ec,
            edge_rows: er,
            truncation_estimate: truncation,
        },
        mask,
        tolerance,
        pass: max[0] <= tolerance && max[1] <= tolerance,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::grid::{linspace, Provenance};

    fn grid_from(f: impl Fn(f64, f64) -> (f64, f64)) -> FieldGrid {
        let x = linspace(-1.0, 1.0, 40);
        let t = linspace(0.0, 1.0, 30);
        let mut u = Vec::new();
        let mut v = Vec::new();
        for &ti in &t {
            let (ur, vr): (Vec<f64>, Vec<f64>) = x.iter().map(|&xj| f(ti, xj)).unzip();
            u.push(ur);
            v.push(vr);
        }
        FieldGrid::new(x, t, u, v, Provenance::Similarity).unwrap()
    }

    #[test]
    fn constant_fields_have_zero_residual() {
        let c = CouplingSpec::custom("vanishing at 1", |t: f64| (t - 1.0).powi(2), |t: f64| 2.0 * (t - 1.0));
        let p = SystemParams::solvable(1.0, 1.0, 1.0).unwrap();
        let r = pde_residual(&grid_from(|_, _| (0.7, 0.7)), &p, &c, 1e-12).unwrap();
        assert_eq!(r.grid_meta.truncation_estimate, 0.0);
        assert_eq!(r.max(), 0.0);
        assert!(r.pass);
    }

    #[test]
    fn zero_fields_without_source() {
        let p = SystemParams::solvable(1.0, 0.0, 1.0).unwrap();
        let r = pde_residual(&grid_from(|_, _| (0.0, 0.0)), &p, &CouplingSpec::constant(1.0), 1e-12).unwrap();
        assert_eq!(r.max(), 0.0);
    }

    #[test]
    fn exact_linear_polynomial_solution() {
        // u = x^3 - 6t solves u_t + u_xxx = 0
        let p = SystemParams::solvable(0.0, 0.0, 1.0).unwrap();
        let r = pde_residual(
            &grid_from(|t, x| (x * x * x - 6.0 * t, 2.0 * x * x * x - 12.0 * t)),
            &p,
            &CouplingSpec::constant(1.0),
            1e-6,
        )
        .unwrap();
        assert!(r.max() < 1e-9, "{:?}", r.per_equation_max);
        assert_eq!(r.grid_meta.edge_columns, 3);
        assert_eq!(r.grid_meta.edge_rows, 2);
    }

    #[test]
    fn dropped_term_shows_up() {
        let p = SystemParams::solvable(0.0, 0.0, 1.0).unwrap();
        let g = grid_from(|t, x| (x * x * x - 6.0 * t, 0.0));
        let r = pde_residual_masked(&g, &p, &CouplingSpec::constant(1.0), 1e-6, TermMask::without(Term::Dispersion)).unwrap();
        assert!((r.per_equation_max[0] - 6.0).abs() < 1e-9);
        assert!(!r.pass);
    }

    #[test]
    fn coarse_grid_is_reported() {
        let p = SystemParams::solvable(0.0, 0.0, 1.0).unwrap();
        let g = grid_from(|t, x| ((5.0 * x - t).sin(), 0.0));
        assert!(matches!(
            pde_residual(&g, &p, &CouplingSpec::constant(1.0), 1e-6),
            Err(Error::GridTooCoarse { .. })
        ));
    }
}
