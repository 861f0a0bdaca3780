use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::json;

use super::commands::{mbp, pde_verify, pii_hierarchy, reduce_solve, MbpMode, Outcome};
use super::config::{load, MbpConfig, PdeVerifyConfig, PiiConfig, ReduceSolveConfig};
use super::json::to_json;
use crate::error::{Error, Result};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "MKDV_SIM_OUT";

#[derive(Debug, Parser)]
#[command(name = "mkdv-sim", version, about = "Similarity solutions of a two-component mKdV system and their verification")]
pub struct Cli {
    /// JSON configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; each command writes into a subdirectory.
    #[arg(long, global = true, env = OUT_ENV, default_value = "mkdv-sim-out")]
    pub out: PathBuf,
    /// Overrides the integration tolerance of the configuration.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Print the JSON summary instead of a table.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the reduced system and monitor its invariant.
    ReduceSolve,
    /// Moving boundary problems.
    #[command(subcommand)]
    Mbp(MbpCommand),
    /// Residual of the full system on reconstructed fields.
    PdeVerify,
    /// Painleve II solutions.
    #[command(subcommand)]
    Pii(PiiCommand),
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum MbpCommand {
    /// Integrate from start data, derive the constants, verify the conditions.
    Build,
    /// Find start data reaching prescribed constants.
    Shoot,
    /// Check given constants against a built problem.
    Verify,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum PiiCommand {
    /// Backlund chain from a seed.
    Hierarchy,
}

impl Command {
    fn slug(&self) -> &'static str {
        match self {
            Command::ReduceSolve => "reduce-solve",
            Command::Mbp(MbpCommand::Build) => "mbp-build",
            Command::Mbp(MbpCommand::Shoot) => "mbp-shoot",
            Command::Mbp(MbpCommand::Verify) => "mbp-verify",
            Command::PdeVerify => "pde-verify",
            Command::Pii(PiiCommand::Hierarchy) => "pii-hierarchy",
        }
    }
}

fn base_dir(config: &Path) -> PathBuf {
    config.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let path = cli.config.as_deref().ok_or_else(|| Error::Config("--config <path> is required".into()))?;
    let base = base_dir(path);
    let out = cli.out.join(cli.command.slug());
    match cli.command {
        Command::ReduceSolve => {
            let mut cfg: ReduceSolveConfig = load(path)?;
            if let Some(t) = cli.tol {
                cfg.integration.tol = t;
                super::config::Validate::validate(&cfg)?;
            }
            reduce_solve(&cfg, &base, &out)
        }
        Command::Mbp(sub) => {
            let mut cfg: MbpConfig = load(path)?;
            if let Some(t) = cli.tol {
                cfg.integration.tol = t;
                super::config::Validate::validate(&cfg)?;
            }
            let mode = match sub {
                MbpCommand::Build => MbpMode::Build,
                MbpCommand::Shoot => MbpMode::Shoot,
                MbpCommand::Verify => MbpMode::Verify,
            };
            mbp(&cfg, mode, &base, &out)
        }
        Command::PdeVerify => {
            let mut cfg: PdeVerifyConfig = load(path)?;
            if let Some(t) = cli.tol {
                cfg.profile.integration.tol = t;
                super::config::Validate::validate(&cfg)?;
            }
            pde_verify(&cfg, &base, &out)
        }
        Command::Pii(PiiCommand::Hierarchy) => {
            let mut cfg: PiiConfig = load(path)?;
            if let Some(t) = cli.tol {
                cfg.integration.tol = t;
                super::config::Validate::validate(&cfg)?;
            }
            pii_hierarchy(&cfg, &out)
        }
    }
}

fn error_kind(e: &Error) -> &'static str {
    if e.is_validation() {
        "validation"
    } else {
        "numerical"
    }
}

/// Parses `args`, runs the command and returns the process exit code:
/// 0 success, 1 numerical failure, 2 configuration or validation error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            if cli.json {
                print!("{}", to_json(&outcome.summary).unwrap_or_default());
            } else {
                print!("{}", outcome.table);
                println!("status: {}", if outcome.pass { "pass" } else { "fail" });
                for a in &outcome.artifacts {
                    println!("wrote {}", a.display());
                }
            }
            if outcome.pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let code = if e.is_validation() { 2 } else { 1 };
            let body = json!({
                "command": cli.command.slug(),
                "status": "error",
                "kind": error_kind(&e),
                "exit_code": code,
                "message": e.to_string(),
            });
            let text = to_json(&body).unwrap_or_default();
            if code == 1 {
                let dir = cli.out.join(cli.command.slug());
                if std::fs::create_dir_all(&dir).is_ok() {
                    let _ = std::fs::write(dir.join("error.json"), &text);
                }
            }
            if cli.json {
                print!("{text}");
            }
            eprintln!("error: {e}");
            code
        }
    }
}
