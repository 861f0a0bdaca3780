// Assembles a moving boundary problem from a reduced profile, derives its
// boundary constants and checks every condition on the reconstructed fields.

use mkdv_similarity::boundary::{
    derive_constants, fit_boundary_exponents, log_spaced_times, verify_boundary_conditions, Condition, Geometry,
    MovingBoundaryProblem, DEFAULT_SAMPLE_TIMES,
};
use mkdv_similarity::erp2::IntegrationOptions;
use mkdv_similarity::reduction::{CouplingSpec, SystemParams};
use mkdv_similarity::Result;

pub fn run_example() -> Result<()> {
    let geometry = Geometry::new(-1.0, 1.0, 1.0)?;
    let params = SystemParams::solvable(1.0, 1.0, 1.0)?;
    let mbp = MovingBoundaryProblem::build(
        geometry,
        [1.07, -1.07, 0.85, 1.26],
        params,
        CouplingSpec::lorentzian(1.0),
        IntegrationOptions::new(1e-10),
    )?;
    let constants = derive_constants(&mbp)?;
    println!(
        "L_m = {:.10}  M_m = {:.10}  P_m = {:.10}  R_m = {:.10}",
        constants.l_m, constants.m_m, constants.p_m, constants.r_m
    );

    let report = verify_boundary_conditions(&mbp, &constants, &DEFAULT_SAMPLE_TIMES)?;
    for c in Condition::ALL {
        println!("{:<28} max relative residual {:.2e}", c.label(), report.residual(c));
    }
    println!("spread of L_m(t): {:.2e}, of M_m(t): {:.2e}", report.l_m_spread, report.m_m_spread);

    let fit = fit_boundary_exponents(&mbp, &log_spaced_times(0.1, 10.0, 21))?;
    println!("fitted exponents: i = {:.8} / {:.8}, j = {:.8}, l = {:.8}", fit.i_left, fit.i_right, fit.j, fit.l);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
