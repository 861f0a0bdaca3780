//! Finite-difference weights on arbitrary nodes.

/// Weights for derivatives `0..=max_order` at `x0` from values at `nodes`
/// (Fornberg's recursion). `w[k][j]` multiplies `f(nodes[j])` in the
/// approximation of the `k`-th derivative.
pub fn fornberg_weights(x0: f64, nodes: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    assert!(n > max_order, "need more nodes than the derivative order");
    let mut c = vec![vec![0.0; n]; max_order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Weights of the `order`-th derivative at offset 0 on integer offsets
/// `offsets`, to be divided by `h^order`.
pub fn unit_weights(offsets: &[i32], order: usize) -> Vec<f64> {
    let nodes: Vec<f64> = offsets.iter().map(|&o| o as f64).collect();
    fornberg_weights(0.0, &nodes, order).swap_remove(order)
}

/// Applies unit weights to samples `f(x0 + offset h)`.
pub fn apply(weights: &[f64], values: &[f64], h: f64, order: usize) -> f64 {
    let s: f64 = weights.iter().zip(values).map(|(w, v)| w * v).sum();
    s / h.powi(order as i32)
}

/// Derivative of fixed order on a uniform grid of `n` points: centred with
/// the requested accuracy where it fits, one-sided of lower accuracy near the
/// ends.
#[derive(Debug, Clone)]
pub struct DiffOperator {
    order: usize,
    reach: usize,
    centred: Vec<f64>,
    /// `(first node, weights)` for each point that cannot take the centred stencil.
    edges: Vec<(usize, Vec<f64>)>,
    n: usize,
}

impl DiffOperator {
    /// `accuracy` must be even; `edge_accuracy` is the order of the one-sided
    /// closures.
    pub fn new(n: usize, order: usize, accuracy: usize, edge_accuracy: usize) -> Self {
        let reach = (order + 1) / 2 + accuracy / 2 - 1;
        let offsets: Vec<i32> = (-(reach as i32)..=reach as i32).collect();
        let mut centred = unit_weights(&offsets, order);
        // impose the exact (anti)symmetry so constants difference to zero
        let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
        let last = centred.len() - 1;
        for k in 0..reach {
            let w = 0.5 * (centred[k] + sign * centred[last - k]);
            centred[k] = w;
            centred[last - k] = sign * w;
        }
        if order % 2 == 1 {
            centred[reach] = 0.0;
        }
        let width = order + edge_accuracy;
        assert!(n >= width.max(2 * reach + 1), "grid of {n} points too short for the stencil");
        let mut edges = Vec::new();
        for j in (0..reach).chain(n - reach..n) {
            let first = if j < reach { 0 } else { n - width };
            let offs: Vec<i32> = (0..width).map(|k| (first + k) as i32 - j as i32).collect();
            edges.push((first, unit_weights(&offs, order)));
        }
        Self { order, reach, centred, edges, n }
    }

    /// Points on each side needed by the centred stencil.
    pub fn reach(&self) -> usize {
        self.reach
    }

    pub fn is_centred(&self, j: usize) -> bool {
        j >= self.reach && j + self.reach < self.n
    }

    /// Derivative at point `j` of samples `f` with spacing `h`.
    pub fn at(&self, f: &[f64], h: f64, j: usize) -> f64 {
        debug_assert_eq!(f.len(), self.n);
        if self.is_centred(j) {
            // pair symmetric nodes so that the cancellation is exact
            let r = self.reach;
            let odd = self.order % 2 == 1;
            let mut s = if odd { 0.0 } else { self.centred[r] * f[j] };
            for k in 0..r {
                let (a, b) = (f[j - r + k], f[j + r - k]);
                s += self.centred[k] * if odd { a - b } else { a + b };
            }
            s / h.powi(self.order as i32)
        } else {
            let k = if j < self.reach { j } else { j - (self.n - self.reach) + self.reach };
            let (first, w) = &self.edges[k];
            apply(w, &f[*first..*first + w.len()], h, self.order)
        }
    }

    /// Derivative at every point.
    pub fn all(&self, f: &[f64], h: f64) -> Vec<f64> {
        (0..self.n).map(|j| self.at(f, h, j)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centred_second_derivative() {
        let w = unit_weights(&[-2, -1, 0, 1, 2], 2);
        let expect = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
        for (a, b) in w.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn one_sided_second_derivative_is_fourth_order() {
        let w = unit_weights(&[0, 1, 2, 3, 4, 5], 2);
        let expect = [15.0 / 4.0, -77.0 / 6.0, 107.0 / 6.0, -13.0, 61.0 / 12.0, -5.0 / 6.0];
        for (a, b) in w.iter().zip(expect) {
            assert!((a - b).abs() < 1e-13, "{a} {b}");
        }
        let err = |h: f64| {
            let v: Vec<f64> = (0..6).map(|k| (0.3 + k as f64 * h).sin()).collect();
            (apply(&w, &v, h, 2) + 0.3f64.sin()).abs()
        };
        let ratio = err(0.02) / err(0.01);
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }

    #[test]
    fn operator_is_exact_on_low_degree_polynomials() {
        let n = 12;
        let h = 0.1;
        let xs: Vec<f64> = (0..n).map(|k| k as f64 * h).collect();
        let q: Vec<f64> = xs.iter().map(|x| x * x - 2.0 * x).collect();
        let f: Vec<f64> = xs.iter().map(|x| x * x * x - 2.0 * x * x).collect();
        let d1 = DiffOperator::new(n, 1, 4, 2);
        let d3 = DiffOperator::new(n, 3, 4, 2);
        for j in 0..n {
            let x = j as f64 * h;
            assert!((d1.at(&q, h, j) - (2.0 * x - 2.0)).abs() < 1e-12);
            assert!((d3.at(&f, h, j) - 6.0).abs() < 1e-9);
        }
        assert_eq!(d3.reach(), 3);
        assert!(!d3.is_centred(2) && d3.is_centred(3) && !d3.is_centred(n - 3));
    }

    #[test]
    fn centred_third_derivative() {
        let w = unit_weights(&[-3, -2, -1, 0, 1, 2, 3], 3);
        let expect = [1.0 / 8.0, -1.0, 13.0 / 8.0, 0.0, -13.0 / 8.0, 1.0, -1.0 / 8.0];
        for (a, b) in w.iter().zip(expect) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
