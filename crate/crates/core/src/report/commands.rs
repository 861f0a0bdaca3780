use std::fs;
use std::path::{Path, PathBuf};

use num_rational::Rational64;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::{
    resolve_coupling, MbpConfig, PdeVerifyConfig, PiiConfig, ReduceSolveConfig, SeedConfig,
};
use super::csv_out::{read_columns, write_table};
use super::json::to_json;
use super::svg::{LinePlot, Series};
use super::table::{sci, TextTable};
use crate::boundary::{
    derive_constants, fit_boundary_exponents, log_spaced_times, shoot_for_targets, verify_boundary_conditions,
    BoundaryConstants, BoundaryReport, Condition, MovingBoundaryProblem, ShootingOptions,
};
use crate::erp2::{invariant_drift, ReducedProfile, ReducedState, ReducedSystem};
use crate::error::{Error, Result};
use crate::painleve::{lukashevich_bt, pii_integrate_tracking, PiiSolution};
use crate::pde::{
    mol_direct_solve, pde_residual, pde_residual_masked, relative_l2_distance, FieldGrid, ResidualReport, TermMask,
    MOL_ORDER,
};
use crate::reduction::{CouplingSpec, SimilarityParams, SystemParams, Term};

/// Threshold the negative controls must exceed.
pub const CONTROL_THRESHOLD: f64 = 1e-2;

/// Result of one command: summary, console table and written files.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub summary: Value,
    pub table: TextTable,
    pub artifacts: Vec<PathBuf>,
    pub pass: bool,
}

struct Artifacts {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Artifacts {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), written: Vec::new() })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.written.push(p.clone());
        p
    }

    fn text(&mut self, name: &str, content: &str) -> Result<()> {
        let p = self.path(name);
        fs::write(p, content)?;
        Ok(())
    }

    fn finish(mut self, summary: Value, table: TextTable, pass: bool) -> Result<Outcome> {
        self.text("summary.json", &to_json(&summary)?)?;
        Ok(Outcome { summary, table, artifacts: self.written, pass })
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

fn profile_rows(profile: &ReducedProfile, xi: &[f64], invariant: Option<&[f64]>) -> Result<Vec<Vec<f64>>> {
    xi.iter()
        .enumerate()
        .map(|(k, &x)| {
            let s = profile.state_at(x)?;
            Ok(vec![x, s.phi, s.phi_prime, s.psi, s.psi_prime, invariant.map_or(f64::NAN, |v| v[k])])
        })
        .collect()
}

fn sample_xi(profile: &ReducedProfile, n: usize) -> Vec<f64> {
    let (lo, hi) = profile.xi_range();
    (0..n).map(|k| if k + 1 == n { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 }).collect()
}

fn state_json(s: &ReducedState) -> Value {
    json!({"xi": s.xi, "phi": s.phi, "phi_prime": s.phi_prime, "psi": s.psi, "psi_prime": s.psi_prime})
}

fn write_profile(art: &mut Artifacts, profile: &ReducedProfile) -> Result<Option<f64>> {
    let conserved = profile.alpha_i() == 0.0 && profile.alpha_ii() == 0.0;
    let series = if conserved { Some(invariant_drift(profile)?) } else { None };
    let xi = match &series {
        Some(s) => s.xi_samples.clone(),
        None => sample_xi(profile, 1001),
    };
    let rows = profile_rows(profile, &xi, series.as_ref().map(|s| s.values.as_slice()))?;
    write_table(&art.path("profile.csv"), &["xi", "phi", "phi_prime", "psi", "psi_prime", "invariant"], rows.clone())?;
    let col = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<f64>>();
    let mut plot = LinePlot::new("Reduced profile", "xi", "value")
        .with(Series::new("Phi", &xi, &col(1)))
        .with(Series::new("Psi", &xi, &col(3)));
    if conserved {
        plot = plot.with(Series::new("I", &xi, &col(5)));
    }
    art.text("profile.svg", &plot.render())?;
    if let Some(s) = &series {
        let drift: Vec<f64> = s.values.iter().map(|v| v - s.reference).collect();
        let p = LinePlot::new("Invariant drift", "xi", "I - I(xi0)").with(Series::new("drift", &xi, &drift));
        art.text("invariant.svg", &p.render())?;
    }
    Ok(series.map(|s| s.max_drift))
}

/// `reduce-solve`: integrates the reduced system and monitors the invariant.
pub fn reduce_solve(cfg: &ReduceSolveConfig, base: &Path, out: &Path) -> Result<Outcome> {
    let params = cfg.params.resolve(None)?;
    let coupling = resolve_coupling(&cfg.coupling, base)?;
    let options = cfg.integration.options();
    let system = ReducedSystem::new(params, coupling.clone())
        .with_integration_constants(cfg.integration_constants[0], cfg.integration_constants[1]);
    let profile = ReducedProfile::solve(cfg.initial_state(), cfg.xi_end, system, options)?;
    let mut art = Artifacts::new(out)?;
    let drift = write_profile(&mut art, &profile)?;

    let fixture = match &cfg.fixture {
        Some(p) => {
            let path = base.join(p);
            let pts = read_columns(&path, "xi", "phi")?;
            let mut worst = 0.0f64;
            let mut used = 0;
            for (x, phi) in pts {
                if profile.covers(x) {
                    worst = worst.max((profile.state_at(x)?.phi - phi).abs());
                    used += 1;
                }
            }
            if used == 0 {
                return Err(Error::Config(format!("{}: no fixture point inside the solved range", path.display())));
            }
            Some((path, worst, used))
        }
        None => None,
    };

    let drift_ok = drift.is_none_or(|d| d <= cfg.drift_tolerance);
    let fixture_ok = fixture.as_ref().is_none_or(|f| f.1 <= cfg.fixture_tolerance);
    let pass = drift_ok && fixture_ok;
    let terminal = profile.terminal();
    let summary = json!({
        "command": "reduce-solve",
        "status": verdict(pass),
        "params": params,
        "coupling": coupling.id(),
        "xi_start": cfg.xi_start,
        "xi_end": cfg.xi_end,
        "integration": {"tol": options.tol, "method": options.method.name(), "max_step": options.max_step, "knots": profile.len()},
        "integration_constants": cfg.integration_constants,
        "terminal": state_json(&terminal),
        "invariant": drift.map(|d| json!({"max_drift": d, "tolerance": cfg.drift_tolerance, "pass": drift_ok})),
        "fixture": fixture.as_ref().map(|(p, d, n)| json!({
            "path": p.display().to_string(), "points": n, "max_deviation": d,
            "tolerance": cfg.fixture_tolerance, "pass": fixture_ok,
        })),
    });
    let mut table = TextTable::new(["quantity", "value"]);
    table.row(["knots".to_string(), profile.len().to_string()]);
    table.row(["Phi(end)".to_string(), format!("{:.12}", terminal.phi)]);
    table.row(["Psi(end)".to_string(), format!("{:.12}", terminal.psi)]);
    if let Some(d) = drift {
        table.row(["invariant max drift".to_string(), sci(d)]);
    }
    if let Some((_, d, _)) = &fixture {
        table.row(["fixture max deviation".to_string(), sci(*d)]);
    }
    art.finish(summary, table, pass)
}

/// Sub-command of `mbp`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MbpMode {
    Build,
    Shoot,
    Verify,
}

fn boundary_artifacts(art: &mut Artifacts, report: &BoundaryReport) -> Result<()> {
    let rows = report.samples.iter().map(|s| {
        vec![
            s.t,
            s.curves.sigma1,
            s.curves.sigma2,
            s.flux_left,
            s.flux_left_expected,
            s.flux_right,
            s.flux_right_expected,
            s.u_left,
            s.u_left_expected,
            s.v_right,
            s.v_right_expected,
            s.l_m_measured,
            s.m_m_measured,
        ]
    });
    write_table(
        &art.path("boundary.csv"),
        &[
            "t",
            "sigma1",
            "sigma2",
            "flux_left",
            "flux_left_expected",
            "flux_right",
            "flux_right_expected",
            "u_left",
            "u_left_expected",
            "v_right",
            "v_right_expected",
            "l_m_measured",
            "m_m_measured",
        ],
        rows,
    )?;
    let t: Vec<f64> = report.samples.iter().map(|s| s.t).collect();
    let mut plot = LinePlot::new("Boundary condition residuals", "t", "relative residual").log_y();
    for c in Condition::ALL {
        let r: Vec<f64> = report.samples.iter().map(|s| s.relative_residual(c).max(1e-17)).collect();
        plot = plot.with(Series::new(c.label(), &t, &r));
    }
    art.text("boundary.svg", &plot.render())
}

fn constants_json(k: &BoundaryConstants) -> Value {
    serde_json::to_value(k).unwrap_or(Value::Null)
}

/// `mbp build|shoot|verify`.
pub fn mbp(cfg: &MbpConfig, mode: MbpMode, base: &Path, out: &Path) -> Result<Outcome> {
    let params = cfg.params.resolve(Some(cfg.geometry.a))?;
    let coupling = resolve_coupling(&cfg.coupling, base)?;
    let options = cfg.integration.options();
    let mut extra = serde_json::Map::new();

    let (problem, constants) = match mode {
        MbpMode::Build | MbpMode::Verify => {
            let start = cfg
                .start
                .ok_or_else(|| Error::Config("`start` is required for mbp build and verify".into()))?;
            let problem = MovingBoundaryProblem::build(cfg.geometry, start, params, coupling.clone(), options)?;
            let constants = if mode == MbpMode::Verify {
                let c = cfg
                    .constants
                    .ok_or_else(|| Error::Config("`constants` is required for mbp verify".into()))?;
                let derived = derive_constants(&problem)?;
                extra.insert("derived_constants".into(), constants_json(&derived));
                BoundaryConstants { l_m: c.l_m, m_m: c.m_m, p_m: c.p_m, r_m: c.r_m, ..derived }
            } else {
                derive_constants(&problem)?
            };
            (problem, constants)
        }
        MbpMode::Shoot => {
            let s = cfg.shoot.ok_or_else(|| Error::Config("`shoot` is required for mbp shoot".into()))?;
            let mut so = ShootingOptions::new(s.auxiliary, options);
            if let Some(u) = s.unknowns {
                so = so.with_unknowns(u);
            }
            if let Some(n) = s.max_iterations {
                so.max_iterations = n;
            }
            if let Some(r) = s.residual_tol {
                so.residual_tol = r;
            }
            let shot = shoot_for_targets(s.targets, cfg.geometry, params, &coupling, s.guess, &so)?;
            let constants = derive_constants(&shot.problem)?;
            let dev = (constants.p_m - s.targets.p_m).abs().max((constants.r_m - s.targets.r_m).abs());
            extra.insert(
                "shooting".into(),
                json!({
                    "targets": s.targets,
                    "start": shot.start,
                    "iterations": shot.iterations,
                    "residual_history": shot.residual_history,
                    "target_deviation": dev,
                }),
            );
            (shot.problem, constants)
        }
    };

    let report = verify_boundary_conditions(&problem, &constants, &cfg.sample_times)?;
    let f = cfg.exponent_fit;
    let fit = fit_boundary_exponents(&problem, &log_spaced_times(f.t_min, f.t_max, f.count))?;
    let fit_dev = [fit.i_left, fit.i_right, fit.j, fit.l].iter().map(|e| (e + 1.0).abs()).fold(0.0, f64::max);

    let mut art = Artifacts::new(out)?;
    let drift = write_profile(&mut art, problem.profile())?;
    boundary_artifacts(&mut art, &report)?;

    let tol = cfg.tolerance;
    let mut pass = report.passes(tol) && report.l_m_spread <= tol && report.m_m_spread <= tol;
    if mode != MbpMode::Verify {
        pass &= fit_dev <= tol;
    }
    if let Some(Value::Object(s)) = extra.get("shooting") {
        pass &= s.get("target_deviation").and_then(Value::as_f64).is_some_and(|d| d <= 1e-8);
    }
    let mut summary = json!({
        "command": format!("mbp {}", match mode { MbpMode::Build => "build", MbpMode::Shoot => "shoot", MbpMode::Verify => "verify" }),
        "status": verdict(pass),
        "geometry": cfg.geometry,
        "params": params,
        "coupling": coupling.id(),
        "start": problem.start()?,
        "constants": constants_json(&constants),
        "tolerance": tol,
        "conditions": report.conditions,
        "l_m_spread": report.l_m_spread,
        "m_m_spread": report.m_m_spread,
        "exponent_fit": fit,
        "exponent_fit_max_deviation": fit_dev,
        "invariant_max_drift": drift,
        "sample_times": cfg.sample_times,
    });
    if let Value::Object(m) = &mut summary {
        m.extend(extra);
    }
    let mut table = TextTable::new(["condition", "max relative residual"]);
    for c in report.conditions {
        table.row([c.condition.label().to_string(), sci(c.max_relative)]);
    }
    table.row(["L_m spread".to_string(), sci(report.l_m_spread)]);
    table.row(["M_m spread".to_string(), sci(report.m_m_spread)]);
    table.row(["exponent fit |e + 1|".to_string(), sci(fit_dev)]);
    art.finish(summary, table, pass)
}

/// One negative control of the residual oracle.
#[derive(Debug, Clone, Serialize)]
pub struct ControlResult {
    pub label: String,
    pub max_residual: f64,
    pub detected: bool,
}

/// Exponent perturbations by `±1/6` and single-term removals; each must
/// drive the residual above [`CONTROL_THRESHOLD`].
///
/// `resample` rebuilds the grid fields under other ansatz exponents.
pub fn negative_controls(
    grid: &FieldGrid,
    resample: impl Fn(&SimilarityParams) -> Result<FieldGrid>,
    params: &SystemParams,
    coupling: &CouplingSpec,
) -> Result<Vec<ControlResult>> {
    let canon = SimilarityParams::canonical();
    let d = Rational64::new(1, 6);
    let mut out = Vec::new();
    let cases = [
        ("m + 1/6", canon.m + d, canon.n, 0.0),
        ("m - 1/6", canon.m - d, canon.n, 0.0),
        ("n + 1/6", canon.m, canon.n + d, 0.0),
        ("n - 1/6", canon.m, canon.n - d, 0.0),
        ("mu + 1/6", canon.m, canon.n, 1.0 / 6.0),
        ("mu - 1/6", canon.m, canon.n, -1.0 / 6.0),
    ];
    for (label, m, n, dmu) in cases {
        let sim = SimilarityParams { m, n, mu: canon.mu + dmu };
        let g = if m == canon.m && n == canon.n { grid.clone() } else { resample(&sim)? };
        let mut p = *params;
        p.mu = canon.mu + dmu;
        let r = pde_residual(&g, &p, coupling, CONTROL_THRESHOLD)?;
        out.push(ControlResult { label: label.into(), max_residual: r.max(), detected: r.max() > CONTROL_THRESHOLD });
    }
    for term in Term::ALL {
        let r = pde_residual_masked(grid, params, coupling, CONTROL_THRESHOLD, TermMask::without(term))?;
        out.push(ControlResult {
            label: format!("without {term:?}"),
            max_residual: r.max(),
            detected: r.max() > CONTROL_THRESHOLD,
        });
    }
    Ok(out)
}

fn residual_artifacts(art: &mut Artifacts, grid: &FieldGrid, report: &ResidualReport, write_grid: bool) -> Result<()> {
    if write_grid {
        let mut rows = Vec::with_capacity(grid.nt() * grid.nx());
        for i in 0..grid.nt() {
            for j in 0..grid.nx() {
                rows.push(vec![
                    grid.t_nodes[i],
                    grid.x_nodes[j],
                    grid.u[i][j],
                    grid.v[i][j],
                    report.residual[0][i][j],
                    report.residual[1][i][j],
                ]);
            }
        }
        write_table(&art.path("grid.csv"), &["t", "x", "u", "v", "res1", "res2"], rows)?;
    }
    let m = &report.grid_meta;
    let rows: Vec<usize> = (m.edge_rows..grid.nt() - m.edge_rows).collect();
    let t: Vec<f64> = rows.iter().map(|&i| grid.t_nodes[i]).collect();
    let mut plot = LinePlot::new("Residual of the full system", "t", "max over x").log_y();
    for k in 0..2 {
        let r: Vec<f64> = rows
            .iter()
            .map(|&i| {
                (m.edge_columns..grid.nx() - m.edge_columns)
                    .map(|j| report.residual[k][i][j].abs())
                    .fold(0.0, f64::max)
                    .max(1e-17)
            })
            .collect();
        plot = plot.with(Series::new(format!("equation {}", k + 1), &t, &r));
    }
    art.text("residual.svg", &plot.render())
}

/// `pde-verify`: reconstructs fields on a grid and evaluates the residual.
pub fn pde_verify(cfg: &PdeVerifyConfig, base: &Path, out: &Path) -> Result<Outcome> {
    let params = cfg.params.resolve(Some(cfg.geometry.a))?;
    let coupling = resolve_coupling(&cfg.coupling, base)?;
    let pc = &cfg.profile;
    let [p, pp, s, sp] = pc.initial;
    let profile = ReducedProfile::solve(
        ReducedState::new(pc.xi_start, p, pp, s, sp),
        pc.xi_end,
        ReducedSystem::new(SystemParams { mu: -2.0, ..params }, coupling.clone()),
        pc.integration.options(),
    )?;
    let spec = cfg.grid_spec()?;
    let similarity = cfg.similarity()?;
    let x_nodes = spec.x_nodes(&cfg.geometry)?;
    let t_nodes = match &cfg.times {
        Some(t) => t.clone(),
        None => spec.t_nodes(),
    };
    let grid = FieldGrid::sample(&profile, &similarity, x_nodes.clone(), t_nodes.clone())?;
    grid.check_inside(&cfg.geometry)?;
    let report = pde_residual(&grid, &params, &coupling, cfg.tolerance)?;

    let controls = if cfg.negative_controls {
        let c = negative_controls(
            &grid,
            |sim| FieldGrid::sample(&profile, sim, x_nodes.clone(), t_nodes.clone()),
            &params,
            &coupling,
        )?;
        Some(c)
    } else {
        None
    };
    let controls_ok = controls.as_ref().is_none_or(|c| c.iter().all(|r| r.detected));

    let direct = match &cfg.direct {
        Some(d) => {
            let mbp = MovingBoundaryProblem::new(cfg.geometry.gamma1, cfg.geometry.gamma2, profile.clone())?;
            let sol = mol_direct_solve(&mbp, &d.resolution())?;
            let exact = FieldGrid::sample(&profile, &similarity, sol.fields.x_nodes.clone(), sol.fields.t_nodes.clone())?;
            let distance = relative_l2_distance(&sol.fields, &exact, sol.fields.nt() - 1)?;
            Some(json!({
                "ny": d.ny,
                "dt": d.dt,
                "t_end": d.t_end,
                "order": MOL_ORDER,
                "steps": sol.steps,
                "newton_iterations": sol.newton_iterations,
                "relative_l2_distance": distance,
                "tolerance": d.tolerance,
                "pass": distance <= d.tolerance,
            }))
        }
        None => None,
    };
    let direct_ok = direct.as_ref().is_none_or(|d| d["pass"] == json!(true));
    let pass = report.pass && controls_ok && direct_ok;

    let mut art = Artifacts::new(out)?;
    residual_artifacts(&mut art, &grid, &report, cfg.write_grid)?;
    let summary = json!({
        "command": "pde-verify",
        "status": verdict(pass),
        "geometry": cfg.geometry,
        "params": params,
        "coupling": coupling.id(),
        "exponents": {"m": similarity.m.to_string(), "n": similarity.n.to_string(), "mu": params.mu},
        "provenance": grid.provenance,
        "residual": report,
        "negative_controls": controls,
        "control_threshold": CONTROL_THRESHOLD,
        "direct": direct,
    });
    let mut table = TextTable::new(["quantity", "value"]);
    table.row(["grid".to_string(), format!("{} x {}", grid.nx(), grid.nt())]);
    table.row(["max residual (u equation)".to_string(), sci(report.per_equation_max[0])]);
    table.row(["max residual (v equation)".to_string(), sci(report.per_equation_max[1])]);
    table.row(["truncation estimate".to_string(), sci(report.grid_meta.truncation_estimate)]);
    for c in controls.iter().flatten() {
        table.row([format!("control {}", c.label), format!("{} {}", sci(c.max_residual), if c.detected { "detected" } else { "MISSED" })]);
    }
    if let Some(d) = &direct {
        let dist = d["relative_l2_distance"].as_f64().unwrap_or(f64::NAN);
        table.row(["direct solve distance".to_string(), sci(dist)]);
    }
    art.finish(summary, table, pass)
}

/// `pii hierarchy`: Backlund chain from a seed with a residual table.
pub fn pii_hierarchy(cfg: &PiiConfig, out: &Path) -> Result<Outcome> {
    let sigma = cfg.sigma()?;
    let window = (cfg.window[0], cfg.window[1]);
    let seed = match cfg.seed {
        SeedConfig::Zero => PiiSolution::zero(sigma),
        SeedConfig::Numeric { z0, w0, w0_prime, alpha_p, z_end } => {
            pii_integrate_tracking(z0, w0, w0_prime, alpha_p, sigma, z_end, cfg.integration.tol)?.0
        }
    };
    let mut chain = vec![seed];
    for _ in 0..cfg.steps {
        let next = lukashevich_bt(chain.last().expect("nonempty"), cfg.direction.direction(), window)?;
        chain.push(next);
    }
    let zs: Vec<f64> = (0..cfg.samples)
        .map(|k| window.0 + (window.1 - window.0) * k as f64 / (cfg.samples - 1) as f64)
        .collect();

    let mut members = Vec::new();
    let mut table = TextTable::new(["member", "alpha_p", "kind", "guards", "max residual"]);
    let mut pass = true;
    for (k, sol) in chain.iter().enumerate() {
        let r = sol.max_residual(&zs)?;
        let ok = r <= cfg.tolerance;
        pass &= ok;
        members.push(json!({
            "index": k,
            "alpha_p": sol.alpha_p(),
            "kind": sol.kind(),
            "depth": sol.depth(),
            "pole_guards": sol.pole_guards(),
            "domain": sol.domain(),
            "max_residual": r,
            "pass": ok,
        }));
        table.row([
            k.to_string(),
            format!("{}", sol.alpha_p()),
            format!("{:?}", sol.kind()),
            sol.pole_guards().len().to_string(),
            sci(r),
        ]);
    }

    let mut art = Artifacts::new(out)?;
    let mut header: Vec<String> = vec!["z".into()];
    header.extend((0..chain.len()).map(|k| format!("w{k}")));
    let rows: Vec<Vec<f64>> = zs
        .iter()
        .map(|&z| {
            let mut r = vec![z];
            r.extend(chain.iter().map(|s| {
                if s.is_guarded(z) || !s.in_domain(z) {
                    f64::NAN
                } else {
                    s.eval(z).map_or(f64::NAN, |v| v.0)
                }
            }));
            r
        })
        .collect();
    let header_ref: Vec<&str> = header.iter().map(String::as_str).collect();
    write_table(&art.path("hierarchy.csv"), &header_ref, rows.clone())?;
    let mut plot = LinePlot::new("Backlund hierarchy", "z", "w");
    for k in 0..chain.len() {
        let w: Vec<f64> = rows.iter().map(|r| r[k + 1]).collect();
        plot = plot.with(Series::new(format!("alpha = {}", chain[k].alpha_p()), &zs, &w));
    }
    art.text("hierarchy.svg", &plot.render())?;

    let summary = json!({
        "command": "pii hierarchy",
        "status": verdict(pass),
        "sigma": sigma,
        "steps": cfg.steps,
        "window": cfg.window,
        "samples": cfg.samples,
        "tolerance": cfg.tolerance,
        "members": members,
    });
    art.finish(summary, table, pass)
}
