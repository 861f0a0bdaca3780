// Recovers start data from prescribed boundary amplitudes by Newton
// shooting, closing the system with the value of the invariant.

use mkdv_similarity::boundary::{
    derive_constants, shoot_for_targets, Auxiliary, FreeStart, Geometry, MovingBoundaryProblem, ShootingOptions,
    Targets,
};
use mkdv_similarity::erp2::{ermakov_invariant, IntegrationOptions, ReducedState};
use mkdv_similarity::reduction::{CouplingSpec, SystemParams};
use mkdv_similarity::Result;

pub fn run_example() -> Result<()> {
    let geometry = Geometry::new(0.5, 1.5, 1.0)?;
    let params = SystemParams::solvable(1.0, 1.0, 1.0)?;
    let coupling = CouplingSpec::lorentzian(1.0);
    let options = IntegrationOptions::new(1e-12);

    // a reference problem supplies reachable targets
    let truth = [0.86, 1.84, 0.8, 1.9];
    let reference = MovingBoundaryProblem::build(geometry, truth, params, coupling.clone(), options)?;
    let constants = derive_constants(&reference)?;
    let invariant = ermakov_invariant(&ReducedState::new(0.5, truth[0], truth[1], truth[2], truth[3]), &params, &coupling)?;

    let outcome = shoot_for_targets(
        Targets { p_m: constants.p_m, r_m: constants.r_m },
        geometry,
        params,
        &coupling,
        FreeStart { phi_prime: 1.84, psi: 0.83, psi_prime: 1.85 },
        &ShootingOptions::new(Auxiliary::Invariant(invariant), options),
    )?;
    println!("converged in {} iterations", outcome.iterations);
    for (k, r) in outcome.residual_history.iter().enumerate() {
        println!("  {k:>2}  {r:.3e}");
    }
    println!(
        "recovered (Psi, Psi') = ({:.12}, {:.12}), expected ({}, {})",
        outcome.start.psi, outcome.start.psi_prime, truth[2], truth[3]
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
