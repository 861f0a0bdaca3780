// The linear case alpha = lambda = 0 reduces to the Airy equation; compares
// the integrated profile with tabulated Ai(3^(-1/3) xi).

use std::path::Path;

use mkdv_similarity::erp2::{IntegrationOptions, ReducedProfile, ReducedState, ReducedSystem};
use mkdv_similarity::reduction::{CouplingSpec, SystemParams};
use mkdv_similarity::report::read_columns;
use mkdv_similarity::Result;

const AI0: f64 = 0.355_028_053_887_817_2;
/// `3^(-1/3) Ai'(0)`.
const AI0_PRIME: f64 = -0.179_455_351_640_452_07;

pub fn run_example() -> Result<()> {
    let params = SystemParams::solvable(0.0, 0.0, 1.0)?;
    let profile = ReducedProfile::solve(
        ReducedState::new(0.0, AI0, AI0_PRIME, AI0, AI0_PRIME),
        2.0,
        ReducedSystem::new(params, CouplingSpec::constant(1.0)),
        IntegrationOptions::new(1e-12),
    )?;
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/airy_reference.csv");
    let table = read_columns(&fixture, "xi", "phi")?;
    let mut worst: f64 = 0.0;
    for &(xi, phi) in &table {
        worst = worst.max((profile.state_at(xi)?.phi - phi).abs());
    }
    println!("{} fixture points, max deviation {worst:.2e}", table.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
