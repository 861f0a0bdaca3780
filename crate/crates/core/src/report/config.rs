use std::path::{Path, PathBuf};

use num_rational::Rational64;
use serde::Deserialize;

use crate::boundary::{Auxiliary, FreeParameter, FreeStart, Geometry, Targets, DEFAULT_SAMPLE_TIMES};
use crate::erp2::{IntegrationOptions, Method, ReducedState};
use crate::error::{Error, Result};
use crate::pde::{GridSpec, MolResolution};
use crate::painleve::{Direction, Sigma};
use crate::reduction::{CouplingSpec, SimilarityParams, SystemParams};

/// Version tag every configuration must carry.
pub const SCHEMA: &str = "mkdv-sim/1";

fn config_error(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub alpha: f64,
    pub lambda: f64,
    /// Defaults to the geometry's shift where a geometry is given.
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default = "default_mu")]
    pub mu: f64,
}

fn default_mu() -> f64 {
    -2.0
}

impl ParamsConfig {
    pub fn resolve(&self, geometry_a: Option<f64>) -> Result<SystemParams> {
        let a = match (self.a, geometry_a) {
            (Some(a), Some(g)) if a != g => {
                return Err(config_error(format!("params.a = {a} disagrees with geometry.a = {g}")))
            }
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => return Err(config_error("params.a is required")),
        };
        SystemParams::new(self.alpha, self.lambda, a, self.mu)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodName {
    #[default]
    DormandPrince54,
    BogackiShampine32,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrationConfig {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub method: MethodName,
    #[serde(default)]
    pub max_step: Option<f64>,
}

fn default_tol() -> f64 {
    1e-10
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        Self { tol: default_tol(), method: MethodName::default(), max_step: None }
    }
}

impl IntegrationConfig {
    pub fn options(&self) -> IntegrationOptions {
        let method = match self.method {
            MethodName::DormandPrince54 => Method::DormandPrince54,
            MethodName::BogackiShampine32 => Method::BogackiShampine32,
        };
        IntegrationOptions { tol: self.tol, method, max_step: self.max_step }
    }
}

/// Resolves a coupling id; table paths are taken relative to `base`.
pub fn resolve_coupling(id: &str, base: &Path) -> Result<CouplingSpec> {
    match id.strip_prefix("table:") {
        Some(p) => CouplingSpec::from_table_file(base.join(p)),
        None => CouplingSpec::parse(id),
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReduceSolveConfig {
    pub schema: String,
    pub params: ParamsConfig,
    pub coupling: String,
    pub xi_start: f64,
    pub xi_end: f64,
    /// `[Phi, Phi', Psi, Psi']` at `xi_start`.
    pub initial: [f64; 4],
    #[serde(default)]
    pub integration_constants: [f64; 2],
    #[serde(default)]
    pub integration: IntegrationConfig,
    /// CSV `(xi, Phi)` to compare the solved `Phi` against.
    #[serde(default)]
    pub fixture: Option<PathBuf>,
    #[serde(default = "default_fixture_tolerance")]
    pub fixture_tolerance: f64,
    /// Threshold on the invariant drift for the verdict.
    #[serde(default = "default_drift_tolerance")]
    pub drift_tolerance: f64,
}

fn default_fixture_tolerance() -> f64 {
    1e-8
}

fn default_drift_tolerance() -> f64 {
    1e-8
}

impl ReduceSolveConfig {
    pub fn initial_state(&self) -> ReducedState {
        let [p, pp, s, sp] = self.initial;
        ReducedState::new(self.xi_start, p, pp, s, sp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentFitConfig {
    pub t_min: f64,
    pub t_max: f64,
    pub count: usize,
}

impl Default for ExponentFitConfig {
    fn default() -> Self {
        Self { t_min: 0.1, t_max: 10.0, count: 21 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsConfig {
    pub l_m: f64,
    pub m_m: f64,
    pub p_m: f64,
    pub r_m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShootConfig {
    pub targets: Targets,
    pub auxiliary: Auxiliary,
    #[serde(default)]
    pub unknowns: Option<[FreeParameter; 2]>,
    pub guess: FreeStart,
    #[serde(default)]
    pub max_iterations: Option<usize>,
    #[serde(default)]
    pub residual_tol: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MbpConfig {
    pub schema: String,
    pub geometry: Geometry,
    pub params: ParamsConfig,
    pub coupling: String,
    /// `[Phi, Phi', Psi, Psi']` at `gamma1`; required by build and verify.
    #[serde(default)]
    pub start: Option<[f64; 4]>,
    #[serde(default)]
    pub integration: IntegrationConfig,
    #[serde(default = "default_sample_times")]
    pub sample_times: Vec<f64>,
    #[serde(default)]
    pub exponent_fit: ExponentFitConfig,
    /// Relative threshold for the boundary residual verdict.
    #[serde(default = "default_boundary_tolerance")]
    pub tolerance: f64,
    /// Constants to check; required by verify.
    #[serde(default)]
    pub constants: Option<ConstantsConfig>,
    /// Required by shoot.
    #[serde(default)]
    pub shoot: Option<ShootConfig>,
}

fn default_sample_times() -> Vec<f64> {
    DEFAULT_SAMPLE_TIMES.to_vec()
}

fn default_boundary_tolerance() -> f64 {
    1e-6
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub xi_start: f64,
    pub xi_end: f64,
    pub initial: [f64; 4],
    #[serde(default)]
    pub integration: IntegrationConfig,
}

/// Exponents written as rationals, e.g. `"-1/3"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentsConfig {
    pub m: String,
    pub n: String,
}

pub fn parse_rational(s: &str) -> Result<Rational64> {
    let s = s.trim();
    let bad = || config_error(format!("`{s}` is not a rational number such as -1/3"));
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim().parse::<i64>().map_err(|_| bad())?, b.trim().parse::<i64>().map_err(|_| bad())?),
        None => (s.parse::<i64>().map_err(|_| bad())?, 1),
    };
    if den == 0 {
        return Err(bad());
    }
    Ok(Rational64::new(num, den))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdeVerifyConfig {
    pub schema: String,
    pub geometry: Geometry,
    pub params: ParamsConfig,
    pub coupling: String,
    pub profile: ProfileConfig,
    #[serde(default)]
    pub grid: GridConfig,
    /// Explicit uniformly spaced time nodes replacing `grid.t_start..t_end`.
    #[serde(default)]
    pub times: Option<Vec<f64>>,
    /// Ansatz exponents; defaults to the reducing pair.
    #[serde(default)]
    pub exponents: Option<ExponentsConfig>,
    #[serde(default = "default_pde_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub negative_controls: bool,
    /// Write the long-format grid CSV.
    #[serde(default = "default_true")]
    pub write_grid: bool,
    /// Optional cross-check against a direct method-of-lines solve.
    #[serde(default)]
    pub direct: Option<DirectConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectConfig {
    #[serde(default = "default_direct_ny")]
    pub ny: usize,
    #[serde(default = "default_direct_dt")]
    pub dt: f64,
    #[serde(default)]
    pub t_start: f64,
    #[serde(default = "default_direct_t_end")]
    pub t_end: f64,
    #[serde(default = "default_direct_nx")]
    pub nx: usize,
    #[serde(default = "default_direct_nt")]
    pub nt: usize,
    /// Bound on the relative L2 distance at `t_end`.
    #[serde(default = "default_direct_tolerance")]
    pub tolerance: f64,
}

fn default_direct_ny() -> usize {
    801
}

fn default_direct_dt() -> f64 {
    0.02
}

fn default_direct_t_end() -> f64 {
    1.0
}

fn default_direct_nx() -> usize {
    MolResolution::default().nx
}

fn default_direct_nt() -> usize {
    MolResolution::default().nt
}

fn default_direct_tolerance() -> f64 {
    1e-4
}

impl DirectConfig {
    pub fn resolution(&self) -> MolResolution {
        MolResolution { ny: self.ny, dt: self.dt, t_start: self.t_start, t_end: self.t_end, nx: self.nx, nt: self.nt }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_nx")]
    pub nx: usize,
    #[serde(default = "default_nt")]
    pub nt: usize,
    #[serde(default = "default_t_start")]
    pub t_start: f64,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_inset")]
    pub inset_stencils: f64,
}

fn default_nx() -> usize {
    GridSpec::default().nx
}
fn default_nt() -> usize {
    GridSpec::default().nt
}
fn default_t_start() -> f64 {
    GridSpec::default().t_start
}
fn default_t_end() -> f64 {
    GridSpec::default().t_end
}
fn default_inset() -> f64 {
    GridSpec::default().inset_stencils
}

impl Default for GridConfig {
    fn default() -> Self {
        let g = GridSpec::default();
        Self { nx: g.nx, nt: g.nt, t_start: g.t_start, t_end: g.t_end, inset_stencils: g.inset_stencils }
    }
}

fn default_pde_tolerance() -> f64 {
    1e-6
}

fn default_true() -> bool {
    true
}

impl PdeVerifyConfig {
    /// Grid layout, with explicit times folded in.
    pub fn grid_spec(&self) -> Result<GridSpec> {
        let g = self.grid;
        let mut spec = GridSpec { nx: g.nx, nt: g.nt, t_start: g.t_start, t_end: g.t_end, inset_stencils: g.inset_stencils };
        if let Some(times) = &self.times {
            if times.is_empty() {
                return Err(config_error("times must not be empty"));
            }
            let n = times.len();
            spec.nt = n;
            spec.t_start = times[0];
            spec.t_end = times[n - 1];
            if n >= 2 {
                let h = (spec.t_end - spec.t_start) / (n - 1) as f64;
                let uniform = times.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs());
                if !uniform || h <= 0.0 {
                    return Err(config_error("times must be increasing and uniformly spaced"));
                }
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn similarity(&self) -> Result<SimilarityParams> {
        let mut s = SimilarityParams::canonical();
        s.mu = self.params.mu;
        if let Some(e) = &self.exponents {
            s.m = parse_rational(&e.m)?;
            s.n = parse_rational(&e.n)?;
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SeedConfig {
    /// `w = 0` at `alpha_p = 0`.
    Zero,
    /// Numerical solution from initial data.
    Numeric { z0: f64, w0: f64, w0_prime: f64, alpha_p: f64, z_end: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionName {
    #[default]
    Up,
    Down,
}

impl DirectionName {
    pub fn direction(self) -> Direction {
        match self {
            DirectionName::Up => Direction::Up,
            DirectionName::Down => Direction::Down,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiiConfig {
    pub schema: String,
    pub seed: SeedConfig,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    pub steps: usize,
    #[serde(default)]
    pub direction: DirectionName,
    /// Interval on which poles are located and residuals sampled.
    pub window: [f64; 2],
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_pii_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_pii_integration")]
    pub integration: IntegrationConfig,
}

fn default_sigma() -> f64 {
    1.0
}
fn default_samples() -> usize {
    801
}
fn default_pii_tolerance() -> f64 {
    1e-8
}
fn default_pii_integration() -> IntegrationConfig {
    IntegrationConfig { tol: 1e-12, ..IntegrationConfig::default() }
}

impl PiiConfig {
    pub fn sigma(&self) -> Result<Sigma> {
        match self.sigma {
            s if s == 1.0 => Ok(Sigma::Plus),
            s if s == -1.0 => Ok(Sigma::Minus),
            s => Err(config_error(format!("sigma must be 1 or -1, got {s}"))),
        }
    }
}

fn check_schema(schema: &str) -> Result<()> {
    if schema == SCHEMA {
        Ok(())
    } else {
        Err(config_error(format!("unsupported schema `{schema}`, expected `{SCHEMA}`")))
    }
}

fn check_finite(name: &str, values: &[f64]) -> Result<()> {
    match values.iter().find(|v| !v.is_finite()) {
        Some(v) => Err(config_error(format!("{name} must be finite, got {v}"))),
        None => Ok(()),
    }
}

fn check_tolerance(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(config_error(format!("{name} must be positive, got {v}")))
    }
}

fn check_integration(c: &IntegrationConfig) -> Result<()> {
    if !(1e-14..=1e-6).contains(&c.tol) {
        return Err(config_error(format!("integration.tol must lie in [1e-14, 1e-6], got {:e}", c.tol)));
    }
    if let Some(h) = c.max_step {
        check_tolerance("integration.max_step", h)?;
    }
    Ok(())
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(config_error("sample_times must not be empty"));
    }
    match times.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
        Some(t) => Err(config_error(format!("sample times must be positive, got {t}"))),
        None => Ok(()),
    }
}

/// Validation run before any computation.
pub trait Validate {
    fn validate(&self) -> Result<()>;
}

impl Validate for ReduceSolveConfig {
    fn validate(&self) -> Result<()> {
        check_schema(&self.schema)?;
        check_finite("initial", &self.initial)?;
        check_finite("xi_start/xi_end", &[self.xi_start, self.xi_end])?;
        if self.xi_start == self.xi_end {
            return Err(config_error(format!("xi_start and xi_end coincide at {}", self.xi_start)));
        }
        check_integration(&self.integration)?;
        check_tolerance("drift_tolerance", self.drift_tolerance)?;
        check_tolerance("fixture_tolerance", self.fixture_tolerance)?;
        self.params.resolve(None)?;
        Ok(())
    }
}

impl Validate for MbpConfig {
    fn validate(&self) -> Result<()> {
        check_schema(&self.schema)?;
        self.geometry.validate().map_err(|e| config_error(e.to_string()))?;
        self.params.resolve(Some(self.geometry.a))?;
        check_integration(&self.integration)?;
        check_times(&self.sample_times)?;
        check_tolerance("tolerance", self.tolerance)?;
        let f = self.exponent_fit;
        if f.count < 2 || !(f.t_min > 0.0 && f.t_max > f.t_min && f.t_max.is_finite()) {
            return Err(config_error("exponent_fit needs 0 < t_min < t_max and count >= 2"));
        }
        if let Some(s) = self.start {
            check_finite("start", &s)?;
        }
        Ok(())
    }
}

impl Validate for PdeVerifyConfig {
    fn validate(&self) -> Result<()> {
        check_schema(&self.schema)?;
        self.geometry.validate().map_err(|e| config_error(e.to_string()))?;
        self.params.resolve(Some(self.geometry.a))?;
        check_integration(&self.profile.integration)?;
        check_finite("profile.initial", &self.profile.initial)?;
        if self.profile.xi_start >= self.profile.xi_end {
            return Err(config_error("profile.xi_start must be below profile.xi_end"));
        }
        check_tolerance("tolerance", self.tolerance)?;
        self.grid_spec()?;
        self.similarity()?;
        if let Some(d) = &self.direct {
            d.resolution().validate().map_err(|e| config_error(format!("direct: {e}")))?;
            check_tolerance("direct.tolerance", d.tolerance)?;
        }
        Ok(())
    }
}

impl Validate for PiiConfig {
    fn validate(&self) -> Result<()> {
        check_schema(&self.schema)?;
        self.sigma()?;
        check_finite("window", &self.window)?;
        if self.window[0] >= self.window[1] {
            return Err(config_error("window must be increasing"));
        }
        if self.samples < 2 {
            return Err(config_error("samples must be at least 2"));
        }
        check_tolerance("tolerance", self.tolerance)?;
        check_integration(&self.integration)?;
        if let SeedConfig::Numeric { z0, w0, w0_prime, alpha_p, z_end } = self.seed {
            check_finite("seed", &[z0, w0, w0_prime, alpha_p, z_end])?;
            if z0 == z_end {
                return Err(config_error("seed.z0 and seed.z_end coincide"));
            }
        }
        Ok(())
    }
}

/// Reads and validates a configuration file.
pub fn load<T: for<'de> Deserialize<'de> + Validate>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

/// Parses and validates a configuration from JSON text.
pub fn parse<T: for<'de> Deserialize<'de> + Validate>(text: &str) -> Result<T> {
    let cfg: T = serde_json::from_str(text)
        .map_err(|e| config_error(format!("invalid JSON: {e}")))?;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const REDUCE: &str = r#"{
        "schema": "mkdv-sim/1",
        "params": {"alpha": 0, "lambda": 0, "a": 1},
        "coupling": "const:c=1",
        "xi_start": 0, "xi_end": 2,
        "initial": [0.355, -0.259, 0.355, -0.259]
    }"#;

    #[test]
    fn minimal_reduce_config() {
        let c: ReduceSolveConfig = parse(REDUCE).unwrap();
        assert_eq!(c.integration.tol, 1e-10);
        assert_eq!(c.params.mu, -2.0);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = REDUCE.replace("\"coupling\"", "\"colour\": 1, \"coupling\"");
        let e = parse::<ReduceSolveConfig>(&text).unwrap_err();
        assert!(e.to_string().contains("unknown field"), "{e}");
        assert!(e.is_validation());
    }

    #[test]
    fn schema_and_interval_are_checked() {
        assert!(parse::<ReduceSolveConfig>(&REDUCE.replace("mkdv-sim/1", "mkdv-sim/0")).is_err());
        let e = parse::<ReduceSolveConfig>(&REDUCE.replace("\"xi_end\": 2", "\"xi_end\": 0")).unwrap_err();
        assert!(e.to_string().contains("coincide"));
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("-1/3").unwrap(), Rational64::new(-1, 3));
        assert_eq!(parse_rational(" 2 ").unwrap(), Rational64::from_integer(2));
        assert!(parse_rational("1/0").is_err() && parse_rational("0.3").is_err());
    }

    #[test]
    fn pii_seed_variants() {
        let text = r#"{"schema": "mkdv-sim/1", "seed": {"kind": "zero"}, "steps": 5, "window": [0.5, 5]}"#;
        let c: PiiConfig = parse(text).unwrap();
        assert_eq!(c.seed, SeedConfig::Zero);
        let bad = text.replace("\"steps\"", "\"sigma\": 2, \"steps\"");
        assert!(parse::<PiiConfig>(&bad).is_err());
    }
}
