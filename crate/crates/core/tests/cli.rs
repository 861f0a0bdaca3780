use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mkdv-sim"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn summary(out: &Path, slug: &str) -> Value {
    let text = fs::read_to_string(out.join(slug).join("summary.json")).expect("summary written");
    serde_json::from_str(&text).expect("summary is JSON")
}

/// Writes `config` into `dir` and returns its path.
fn write_config(dir: &Path, name: &str, config: &Value) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string_pretty(config).unwrap()).unwrap();
    p
}

fn airy_config() -> Value {
    let text = fs::read_to_string(configs().join("reduce_airy.json")).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    let fixture = configs().join("../tests/fixtures/airy_reference.csv");
    v["fixture"] = Value::String(fixture.to_string_lossy().into_owned());
    v
}

#[test]
fn airy_run_matches_fixture() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "airy.json", &airy_config());
    let out = dir.path().join("out");
    let o = run(&["reduce-solve", "--config", cfg.to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(&out, "reduce-solve");
    assert_eq!(s["status"], "pass");
    for f in ["profile.csv", "profile.svg", "invariant.svg"] {
        assert!(out.join("reduce-solve").join(f).exists(), "{f} missing");
    }
}

#[test]
fn identical_configs_give_identical_summaries() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "airy.json", &airy_config());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = run(&["reduce-solve", "--config", cfg.to_str().unwrap()], out);
        assert_eq!(o.status.code(), Some(0));
    }
    let read = |p: &Path| fs::read(p.join("reduce-solve").join("summary.json")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn malformed_json_is_a_validation_error() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, "{ \"schema\": ").unwrap();
    let o = run(&["reduce-solve", "--config", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("invalid JSON"));
}

#[test]
fn unknown_field_is_a_validation_error() {
    let dir = TempDir::new().unwrap();
    let mut v = airy_config();
    v["extra"] = Value::Bool(true);
    let cfg = write_config(dir.path(), "extra.json", &v);
    let o = run(&["reduce-solve", "--config", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn coincident_boundaries_are_rejected() {
    let dir = TempDir::new().unwrap();
    let text = fs::read_to_string(configs().join("mbp_build.json")).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["geometry"]["gamma2"] = v["geometry"]["gamma1"].clone();
    let cfg = write_config(dir.path(), "mbp.json", &v);
    let o = run(&["mbp", "build", "--config", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn empty_time_list_is_rejected() {
    let dir = TempDir::new().unwrap();
    let text = fs::read_to_string(configs().join("pde_verify.json")).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["times"] = Value::Array(vec![]);
    let cfg = write_config(dir.path(), "pde.json", &v);
    let o = run(&["pde-verify", "--config", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn loose_tolerance_override_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "airy.json", &airy_config());
    let o = run(&["reduce-solve", "--config", cfg.to_str().unwrap(), "--tol", "1e-3"], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_config_is_rejected() {
    let dir = TempDir::new().unwrap();
    let o = run(&["pii", "hierarchy"], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_flag_prints_the_summary() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "airy.json", &airy_config());
    let o = run(&["reduce-solve", "--json", "--config", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).expect("stdout is JSON");
    assert_eq!(v["command"], "reduce-solve");
}

#[test]
fn zero_step_hierarchy_returns_the_seed() {
    let dir = TempDir::new().unwrap();
    let v = serde_json::json!({
        "schema": "mkdv-sim/1",
        "seed": {"kind": "zero"},
        "steps": 0,
        "window": [-5.0, 5.0],
    });
    let cfg = write_config(dir.path(), "pii.json", &v);
    let out = dir.path().join("out");
    let o = run(&["pii", "hierarchy", "--config", cfg.to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(&out, "pii-hierarchy");
    let members = s["members"].as_array().unwrap();
    assert_eq!(members.len(), 1);
    assert_eq!(members[0]["alpha_p"].as_f64(), Some(0.0));
    assert_eq!(members[0]["kind"], "ExactRational");
}

#[test]
fn shipped_configs_pass() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let cases: [(&[&str], &str); 5] = [
        (&["reduce-solve"], "reduce_coupled.json"),
        (&["mbp", "build"], "mbp_build.json"),
        (&["mbp", "shoot"], "mbp_shoot.json"),
        (&["mbp", "verify"], "mbp_verify.json"),
        (&["pii", "hierarchy"], "pii_hierarchy.json"),
    ];
    for (cmd, file) in cases {
        let cfg = configs().join(file);
        let mut args = cmd.to_vec();
        args.extend(["--config", cfg.to_str().unwrap()]);
        let o = run(&args, &out);
        assert_eq!(o.status.code(), Some(0), "{file}: {}", String::from_utf8_lossy(&o.stderr));
    }
}
