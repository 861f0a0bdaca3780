// Compares candidate readings of the Ermakov invariant: only the conserved
// one stays flat along a profile.

use mkdv_similarity::erp2::{invariant_candidates, IntegrationOptions, ReducedProfile, ReducedState, ReducedSystem};
use mkdv_similarity::reduction::{CouplingSpec, SystemParams};
use mkdv_similarity::Result;

pub fn run_example() -> Result<()> {
    let params = SystemParams::solvable(1.0, 1.0, 1.0)?;
    let profile = ReducedProfile::solve(
        ReducedState::new(0.5, 0.86, 2.77, -0.86, -1.19),
        1.5,
        ReducedSystem::new(params, CouplingSpec::quadratic(1.0)),
        IntegrationOptions::new(1e-12),
    )?;
    println!("{:<50}  {:>10}  {:>10}", "reading", "drift", "relative");
    for c in invariant_candidates(&profile)? {
        println!("{:<50}  {:>10.2e}  {:>10.2e}", c.formula, c.max_drift, c.relative_drift);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
