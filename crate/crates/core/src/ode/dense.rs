use super::hermite::{quintic_hermite, HermiteNode};
use super::rk::Knot;
use crate::error::{Error, Result};

/// Dense output for a first-order system laid out as `[q0, q0', q1, q1', ...]`.
///
/// Each position component is interpolated by a quintic Hermite polynomial
/// matching value, first and second derivative at both ends of every solver
/// step, so the interpolant is C² across knots.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTrajectory {
    knots: Vec<Knot>,
}

impl DenseTrajectory {
    /// Builds the trajectory from solver knots in either integration direction.
    pub fn from_knots(mut knots: Vec<Knot>) -> Self {
        assert!(!knots.is_empty(), "trajectory needs at least one knot");
        assert!(knots[0].y.len() % 2 == 0, "second-order layout expected");
        if knots.len() > 1 && knots[1].x < knots[0].x {
            knots.reverse();
        }
        Self { knots }
    }

    pub fn knots(&self) -> &[Knot] {
        &self.knots
    }

    pub fn components(&self) -> usize {
        self.knots[0].y.len() / 2
    }

    pub fn range(&self) -> (f64, f64) {
        (self.knots[0].x, self.knots[self.knots.len() - 1].x)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.locate(x).is_ok()
    }

    fn locate(&self, x: f64) -> Result<usize> {
        let (lo, hi) = self.range();
        let slack = 1e-12 * lo.abs().max(hi.abs()).max(1.0);
        if !(x >= lo - slack && x <= hi + slack) {
            return Err(Error::OutOfDomain { x, lo, hi });
        }
        if self.knots.len() == 1 {
            return Ok(0);
        }
        let idx = self.knots.partition_point(|k| k.x <= x);
        Ok(idx.clamp(1, self.knots.len() - 1) - 1)
    }

    /// Value and first three derivatives of position component `c` at `x`.
    pub fn eval(&self, c: usize, x: f64) -> Result<[f64; 4]> {
        let i = self.locate(x)?;
        if self.knots.len() == 1 {
            let k = &self.knots[0];
            return Ok([k.y[2 * c], k.y[2 * c + 1], k.dy[2 * c + 1], f64::NAN]);
        }
        let node = |k: &Knot| HermiteNode {
            x: k.x,
            q: k.y[2 * c],
            v: k.y[2 * c + 1],
            a: k.dy[2 * c + 1],
        };
        let x = x.clamp(self.knots[i].x, self.knots[i + 1].x);
        Ok(quintic_hermite(&node(&self.knots[i]), &node(&self.knots[i + 1]), x))
    }

    /// Full state `[q0, q0', q1, q1', ...]` at `x`.
    pub fn state(&self, x: f64) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(2 * self.components());
        for c in 0..self.components() {
            let [q, v, _, _] = self.eval(c, x)?;
            out.push(q);
            out.push(v);
        }
        Ok(out)
    }

    pub fn first(&self) -> &Knot {
        &self.knots[0]
    }

    pub fn last(&self) -> &Knot {
        &self.knots[self.knots.len() - 1]
    }
}
