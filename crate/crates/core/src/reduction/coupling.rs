use std::fmt;
use std::path::Path;
use std::sync::Arc;

use super::spline::CubicSpline;
use crate::error::{Error, Result};

/// Amplitudes below this magnitude make the rational source terms singular.
pub const GUARD_BAND: f64 = 1e-12;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Generator {
    Constant(f64),
    Quadratic(f64),
    Lorentzian(f64),
    Sine(f64),
    Table(Arc<CubicSpline>),
    Custom { j: ScalarFn, j_prime: ScalarFn },
}

/// Generating function `J(theta)` of the Hamiltonian coupling, with
/// `theta = psi / phi`.
///
/// The source functions follow from `J` as `S(theta) = 2 theta J + theta^2 J'`
/// and `T = -theta^2 J'`. `T` is formally a function of `phi / psi = 1/theta`,
/// but every value here is computed from `theta`.
#[derive(Clone)]
pub struct CouplingSpec {
    generator: Generator,
    id: String,
}

impl fmt::Debug for CouplingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("CouplingSpec").field(&self.id).finish()
    }
}

/// Values of the two source functions at one ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceValues {
    pub s: f64,
    pub t: f64,
}

impl CouplingSpec {
    /// `J = c`.
    pub fn constant(c: f64) -> Self {
        Self { generator: Generator::Constant(c), id: format!("const:c={c}") }
    }

    /// `J = c theta^2`.
    pub fn quadratic(c: f64) -> Self {
        Self { generator: Generator::Quadratic(c), id: format!("quadratic:c={c}") }
    }

    /// `J = c / (1 + theta^2)`.
    pub fn lorentzian(c: f64) -> Self {
        Self { generator: Generator::Lorentzian(c), id: format!("lorentzian:c={c}") }
    }

    /// `J = c sin(theta)`.
    pub fn sine(c: f64) -> Self {
        Self { generator: Generator::Sine(c), id: format!("sine:c={c}") }
    }

    /// Tabulated `J` interpolated by a natural cubic spline.
    pub fn table(theta: Vec<f64>, j: Vec<f64>, id: impl Into<String>) -> Result<Self> {
        let spline = CubicSpline::new(theta, j)?;
        Ok(Self { generator: Generator::Table(Arc::new(spline)), id: id.into() })
    }

    /// Reads a two-column CSV `(theta, J)` with a header line.
    pub fn from_table_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_path(path)?;
        let (mut theta, mut j) = (Vec::new(), Vec::new());
        for record in reader.records() {
            let record = record?;
            if record.len() != 2 {
                return Err(Error::Config(format!(
                    "{}: expected two columns, found {}",
                    path.display(),
                    record.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::Config(format!("{}: bad number `{s}`: {e}", path.display())))
            };
            theta.push(parse(&record[0])?);
            j.push(parse(&record[1])?);
        }
        Self::table(theta, j, format!("table:{}", path.display()))
    }

    /// User-supplied `J` and its derivative.
    pub fn custom<F, G>(id: impl Into<String>, j: F, j_prime: G) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            generator: Generator::Custom { j: Arc::new(j), j_prime: Arc::new(j_prime) },
            id: id.into(),
        }
    }

    /// Parses a catalogue id such as `const:c=1.5`, `quadratic:c=0.2`,
    /// `lorentzian`, `sine` or `table:<path>`.
    pub fn parse(id: &str) -> Result<Self> {
        let (kind, rest) = match id.split_once(':') {
            Some((k, r)) => (k.trim(), Some(r.trim())),
            None => (id.trim(), None),
        };
        if kind == "table" {
            let path = rest.filter(|p| !p.is_empty()).ok_or_else(|| Error::Config("table coupling needs a path".into()))?;
            return Self::from_table_file(path);
        }
        let c = match rest {
            None => 1.0,
            Some(arg) => {
                let value = arg
                    .strip_prefix("c=")
                    .ok_or_else(|| Error::Config(format!("coupling `{id}`: expected `c=<value>`")))?;
                let c: f64 = value
                    .trim()
                    .parse()
                    .map_err(|e| Error::Config(format!("coupling `{id}`: {e}")))?;
                if !c.is_finite() {
                    return Err(Error::Config(format!("coupling `{id}`: c must be finite")));
                }
                c
            }
        };
        match kind {
            "const" => Ok(Self::constant(c)),
            "quadratic" => Ok(Self::quadratic(c)),
            "lorentzian" => Ok(Self::lorentzian(c)),
            "sine" => Ok(Self::sine(c)),
            _ => Err(Error::Config(format!("unknown coupling kind `{kind}`"))),
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    fn domain_error(&self, theta: f64) -> Error {
        Error::EvaluationDomain { label: self.id.clone(), theta }
    }

    /// `J(theta)` and `J'(theta)`.
    pub fn eval(&self, theta: f64) -> Result<(f64, f64)> {
        if !theta.is_finite() {
            return Err(self.domain_error(theta));
        }
        let (j, jp) = match &self.generator {
            Generator::Constant(c) => (*c, 0.0),
            Generator::Quadratic(c) => (c * theta * theta, 2.0 * c * theta),
            Generator::Lorentzian(c) => {
                let d = 1.0 + theta * theta;
                (c / d, -2.0 * c * theta / (d * d))
            }
            Generator::Sine(c) => (c * theta.sin(), c * theta.cos()),
            Generator::Table(s) => s.eval(theta).ok_or_else(|| self.domain_error(theta))?,
            Generator::Custom { j, j_prime } => (j(theta), j_prime(theta)),
        };
        if j.is_finite() && jp.is_finite() {
            Ok((j, jp))
        } else {
            Err(self.domain_error(theta))
        }
    }

    /// `S(theta) = 2 theta J + theta^2 J'` and `T = -theta^2 J'`.
    pub fn source_values(&self, theta: f64) -> Result<SourceValues> {
        let (j, jp) = self.eval(theta)?;
        Ok(SourceValues {
            s: 2.0 * theta * j + theta * theta * jp,
            t: -theta * theta * jp,
        })
    }

    /// Rational source terms `S/(phi^2 psi)` and `T/(psi^2 phi)`.
    ///
    /// `at` is the coordinate reported if an amplitude lies in the guard band.
    pub fn source_terms(&self, phi: f64, psi: f64, at: f64) -> Result<(f64, f64)> {
        if !(phi.abs() >= GUARD_BAND && psi.abs() >= GUARD_BAND) {
            return Err(Error::SingularState { xi: at, phi, psi });
        }
        let sv = self.source_values(psi / phi)?;
        Ok((sv.s / (phi * phi * psi), sv.t / (psi * psi * phi)))
    }

    /// Largest deviation between `J'` and a centred difference of `J` over the
    /// given sample ratios.
    pub fn consistency_error(&self, thetas: &[f64], h: f64) -> Result<f64> {
        let mut worst = 0.0f64;
        for &t in thetas {
            let jp = self.eval(t)?.1;
            let fd = (self.eval(t + h)?.0 - self.eval(t - h)?.0) / (2.0 * h);
            worst = worst.max((fd - jp).abs());
        }
        Ok(worst)
    }
}

/// Free-function form of [`CouplingSpec::source_values`].
pub fn source_functions(coupling: &CouplingSpec, theta: f64) -> Result<SourceValues> {
    coupling.source_values(theta)
}
