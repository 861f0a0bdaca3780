use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients of the extended two-component mKdV system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Cubic coupling coefficient.
    pub alpha: f64,
    /// Strength of the temporally modulated source.
    pub lambda: f64,
    /// Time shift; fields depend on `t + a`.
    pub a: f64,
    /// Exponent of the modulation factor `(t + a)^mu`.
    pub mu: f64,
}

impl SystemParams {
    pub fn new(alpha: f64, lambda: f64, a: f64, mu: f64) -> Result<Self> {
        let p = Self { alpha, lambda, a, mu };
        p.validate()?;
        Ok(p)
    }

    /// Parameters of the similarity-solvable class (`mu = -2`).
    pub fn solvable(alpha: f64, lambda: f64, a: f64) -> Result<Self> {
        Self::new(alpha, lambda, a, -2.0)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha", self.alpha), ("lambda", self.lambda), ("a", self.a), ("mu", self.mu)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")));
            }
        }
        if self.a <= 0.0 {
            return Err(Error::InvalidParameter(format!("time shift a must be positive, got {}", self.a)));
        }
        Ok(())
    }

    /// `t + a`, rejecting times at or before the singular instant `t = -a`.
    pub fn shifted_time(&self, t: f64) -> Result<f64> {
        let s = t + self.a;
        if s > 0.0 && s.is_finite() {
            Ok(s)
        } else {
            Err(Error::InvalidParameter(format!("t + a must be positive (t = {t}, a = {})", self.a)))
        }
    }
}

/// Exponents of the ansatz `u = (t+a)^m Phi(x / (t+a)^n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityParams {
    pub m: Rational64,
    pub n: Rational64,
    pub mu: f64,
}

impl SimilarityParams {
    pub fn canonical() -> Self {
        Self {
            m: Rational64::new(-1, 3),
            n: Rational64::new(1, 3),
            mu: -2.0,
        }
    }

    pub fn m_f64(&self) -> f64 {
        *self.m.numer() as f64 / *self.m.denom() as f64
    }

    pub fn n_f64(&self) -> f64 {
        *self.n.numer() as f64 / *self.n.denom() as f64
    }

    /// True only for the configuration that collapses the system to ODEs.
    pub fn is_reducing(&self) -> bool {
        let c = Self::canonical();
        self.m == c.m && self.n == c.n && self.mu == c.mu
    }
}

/// One of the four term families of the system after substituting the ansatz.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Term {
    TimeDerivative,
    Dispersion,
    Cubic,
    ModulatedSource,
}

impl Term {
    pub const ALL: [Term; 4] = [Term::TimeDerivative, Term::Dispersion, Term::Cubic, Term::ModulatedSource];
}

/// Power of `(t + a)` multiplying one term family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Balance {
    pub term: Term,
    pub exponent: f64,
}

/// Powers of `(t+a)` carried by each term: `m-1`, `m-3n`, `3m-n`, `mu-3m-n`.
pub fn balance_exponents(m: f64, n: f64, mu: f64) -> [Balance; 4] {
    [
        Balance { term: Term::TimeDerivative, exponent: m - 1.0 },
        Balance { term: Term::Dispersion, exponent: m - 3.0 * n },
        Balance { term: Term::Cubic, exponent: 3.0 * m - n },
        Balance { term: Term::ModulatedSource, exponent: mu - 3.0 * m - n },
    ]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    Reducing,
    /// The source term's power does not match the common power of the others.
    NonReducing { term: Term, exponent: f64, expected: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentReduction {
    pub similarity: SimilarityParams,
    pub balances: [Balance; 4],
    pub verdict: Verdict,
}

/// Solves the power balance of the ansatz.
///
/// Matching time derivative against dispersion fixes `n = 1/3`; matching it
/// against the cubic term then fixes `m = (n - 1)/2 = -1/3`. The source term
/// balances only if `mu = 4m + n - 1 = -2`.
pub fn reduce_exponents(system: &SystemParams) -> ExponentReduction {
    let n = Rational64::new(1, 3);
    let m = (n - Rational64::from_integer(1)) / Rational64::from_integer(2);
    let required_mu = Rational64::from_integer(4) * m + n - Rational64::from_integer(1);
    let similarity = SimilarityParams { m, n, mu: system.mu };
    let balances = balance_exponents(similarity.m_f64(), similarity.n_f64(), system.mu);
    let required = *required_mu.numer() as f64 / *required_mu.denom() as f64;
    let verdict = if system.mu == required {
        Verdict::Reducing
    } else {
        Verdict::NonReducing {
            term: Term::ModulatedSource,
            exponent: balances[3].exponent,
            expected: balances[0].exponent,
        }
    };
    ExponentReduction { similarity, balances, verdict }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_exponents() {
        let p = SystemParams::solvable(1.0, 1.0, 1.0).unwrap();
        let r = reduce_exponents(&p);
        assert_eq!(r.verdict, Verdict::Reducing);
        assert_eq!(r.similarity, SimilarityParams::canonical());
        assert!(r.similarity.is_reducing());
    }

    #[test]
    fn all_balances_equal_minus_four_thirds() {
        for b in balance_exponents(-1.0 / 3.0, 1.0 / 3.0, -2.0) {
            assert!((b.exponent + 4.0 / 3.0).abs() < 1e-15, "{:?}", b.term);
        }
    }

    #[test]
    fn unmodulated_source_does_not_reduce() {
        let p = SystemParams::new(1.0, 1.0, 1.0, 0.0).unwrap();
        match reduce_exponents(&p).verdict {
            Verdict::NonReducing { term, exponent, expected } => {
                assert_eq!(term, Term::ModulatedSource);
                assert!((exponent - 2.0 / 3.0).abs() < 1e-15);
                assert!((expected + 4.0 / 3.0).abs() < 1e-15);
            }
            v => panic!("expected non-reducing, got {v:?}"),
        }
    }

    #[test]
    fn rejects_nonpositive_shift() {
        assert!(SystemParams::solvable(1.0, 1.0, 0.0).is_err());
        assert!(SystemParams::solvable(1.0, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn perturbed_similarity_is_flagged() {
        let mut s = SimilarityParams::canonical();
        s.n = Rational64::new(1, 2);
        assert!(!s.is_reducing());
    }
}
