use std::ops::{Add, Mul, Neg, Sub};

use super::dd::Dd;

/// Truncated Taylor series `sum c_k (z - z0)^k` with double-double
/// coefficients.
///
/// Arithmetic on jets propagates exact derivatives through rational
/// expressions, which is how Backlund images are differentiated. Nested
/// images cancel leading singular terms near removable singularities, so the
/// coefficients carry about 32 significant digits.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    c: Vec<Dd>,
}

fn tf(x: f64) -> Dd {
    Dd::from(x)
}

impl Jet {
    /// Coefficients must be normalised Taylor coefficients `f^(k)(z0) / k!`.
    pub fn from_coefficients(c: Vec<f64>) -> Self {
        assert!(!c.is_empty());
        Self { c: c.into_iter().map(tf).collect() }
    }

    pub fn constant(v: f64, order: usize) -> Self {
        let mut c = vec![Dd::ZERO; order + 1];
        c[0] = tf(v);
        Self { c }
    }

    /// The independent variable expanded about `z0`.
    pub fn variable(z0: f64, order: usize) -> Self {
        let mut j = Self::constant(z0, order);
        if order >= 1 {
            j.c[1] = tf(1.0);
        }
        j
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    /// Coefficients rounded to `f64`.
    pub fn coefficients(&self) -> Vec<f64> {
        self.c.iter().map(|v| v.to_f64()).collect()
    }

    /// `k`-th derivative at the expansion point.
    pub fn derivative_value(&self, k: usize) -> f64 {
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        (self.c[k] * fact).to_f64()
    }

    pub fn value(&self) -> f64 {
        self.c[0].to_f64()
    }

    /// Jet of the derivative; its order is one lower.
    pub fn derivative(&self) -> Jet {
        if self.c.len() == 1 {
            return Jet::constant(0.0, 0);
        }
        Jet {
            c: (1..self.c.len()).map(|k| self.c[k] * k as f64).collect(),
        }
    }

    pub fn truncate(&self, order: usize) -> Jet {
        assert!(order <= self.order());
        Jet { c: self.c[..=order].to_vec() }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet { c: self.c.iter().map(|v| *v * s).collect() }
    }

    pub fn add_scalar(&self, s: f64) -> Jet {
        let mut j = self.clone();
        j.c[0] += s;
        j
    }

    /// Quotient of two jets; `None` if the divisor vanishes at the expansion point.
    pub fn div(&self, other: &Jet) -> Option<Jet> {
        let n = self.c.len().min(other.c.len());
        let d0 = other.c[0];
        if d0.is_zero() || !d0.is_finite() {
            return None;
        }
        let mut q = vec![Dd::ZERO; n];
        for k in 0..n {
            let mut acc = self.c[k];
            for j in 0..k {
                acc -= q[j] * other.c[k - j];
            }
            q[k] = acc / d0;
        }
        Some(Jet { c: q })
    }

    pub fn recip(&self) -> Option<Jet> {
        Jet::constant(1.0, self.order()).div(self)
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        let n = self.c.len().min(rhs.c.len());
        Jet { c: (0..n).map(|k| self.c[k] + rhs.c[k]).collect() }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        let n = self.c.len().min(rhs.c.len());
        Jet { c: (0..n).map(|k| self.c[k] - rhs.c[k]).collect() }
    }
}

fn convolution(a: &[Dd], b: &[Dd], k: usize) -> Dd {
    (0..=k).fold(Dd::ZERO, |acc, j| acc + a[j] * b[k - j])
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let n = self.c.len().min(rhs.c.len());
        Jet { c: (0..n).map(|k| convolution(&self.c, &rhs.c, k)).collect() }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet { c: self.c.iter().map(|v| -*v).collect() }
    }
}

/// Taylor jet of the solution of `w'' = sigma 2 w^3 + z w + alpha` through
/// `(w, w')` at `z0`, generated from the equation itself.
pub fn painleve_jet(z0: f64, w: f64, w_prime: f64, alpha: f64, sigma: f64, order: usize) -> Jet {
    let mut c = vec![Dd::ZERO; order.max(1) + 1];
    c[0] = tf(w);
    c[1] = tf(w_prime);
    // running coefficients of w^2 and w^3
    let mut sq = Vec::with_capacity(c.len());
    let mut cube = Vec::with_capacity(c.len());
    for k in 0..c.len().saturating_sub(2) {
        sq.push(convolution(&c, &c, k));
        cube.push(convolution(&sq, &c, k));
        let zw = c[k] * z0 + if k > 0 { c[k - 1] } else { tf(0.0) };
        let forcing = if k == 0 { alpha } else { 0.0 };
        c[k + 2] = (cube[k] * (2.0 * sigma) + zw + forcing) / ((k + 2) as f64 * (k + 1) as f64);
    }
    c.truncate(order + 1);
    Jet { c }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_matches_known_series() {
        // 1/(1 - z) about 0
        let z = Jet::variable(0.0, 5);
        let one_minus = (&Jet::constant(1.0, 5)) - &z;
        let r = one_minus.recip().unwrap();
        assert!(r.coefficients().iter().all(|&c| (c - 1.0).abs() < 1e-15));
        // (z^2)' at z0 = 3
        let z = Jet::variable(3.0, 4);
        let sq = &z * &z;
        assert_eq!(sq.derivative_value(1), 6.0);
        assert_eq!(sq.derivative_value(2), 2.0);
        assert_eq!(sq.derivative().value(), 6.0);
    }

    #[test]
    fn division_by_vanishing_jet_is_refused() {
        let z = Jet::variable(0.0, 3);
        assert!(Jet::constant(1.0, 3).div(&z).is_none());
    }

    #[test]
    fn painleve_jet_reproduces_minus_one_over_z() {
        // w = -1/z solves the equation with alpha = 1, sigma = +1
        let z0: f64 = 1.7;
        let j = painleve_jet(z0, -1.0 / z0, 1.0 / (z0 * z0), 1.0, 1.0, 6);
        for k in 0..=6 {
            let fact: f64 = (1..=k).map(|i| i as f64).product();
            let exact = -(-1f64).powi(k as i32) * fact / z0.powi(k as i32 + 1);
            assert!((j.derivative_value(k) - exact).abs() < 1e-12 * exact.abs().max(1.0), "k = {k}");
        }
    }
}
