// The decoupled specialisation: with lambda = 0 a single component maps to
// canonical Painleve II, and with the Hamiltonian coupling the general
// right-hand side reproduces the explicit decoupled form.

use mkdv_similarity::erp2::{rhs, IntegrationOptions, ReducedProfile, ReducedState, ReducedSystem};
use mkdv_similarity::painleve::{decoupled_coupling, decoupled_erp2_rhs, map_reduced_to_pii, mapped_residual, SourceReading};
use mkdv_similarity::reduction::{CouplingSpec, SystemParams};
use mkdv_similarity::Result;

pub fn run_example() -> Result<()> {
    // pure cubic case with Psi = 0: Phi'' = xi Phi / 3 - alpha Phi^3
    let params = SystemParams::solvable(-2.0, 0.0, 1.0)?;
    let scaling = map_reduced_to_pii(&params)?;
    let profile = ReducedProfile::solve(
        ReducedState::new(0.0, 0.4, -0.1, 0.0, 0.0),
        2.0,
        ReducedSystem::new(params, CouplingSpec::constant(1.0)),
        IntegrationOptions::new(1e-12),
    )?;
    let zs: Vec<f64> = (1..20).map(|k| scaling.z(0.1 * k as f64)).collect();
    println!(
        "amplitude {:.10}, scale {:.10}, sigma {:?}",
        scaling.amplitude, scaling.scale, scaling.sigma
    );
    println!("canonical residual of the mapped profile: {:.2e}", mapped_residual(&profile, &scaling, &zs)?);

    let params = SystemParams::solvable(1.0, 0.7, 1.0)?;
    let state = ReducedState::new(0.9, 0.8, 0.1, 1.3, -0.2);
    let (a, b) = decoupled_erp2_rhs(&state, &params, SourceReading::Symmetric)?;
    let general = rhs(&state, &params, &decoupled_coupling())?;
    println!("explicit ({a:.12}, {b:.12}) vs general ({:.12}, {:.12})", general.0, general.1);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
