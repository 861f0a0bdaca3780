use mkdv_similarity::boundary::{
    derive_constants, shoot_for_targets, Auxiliary, FreeParameter, FreeStart, Geometry, MovingBoundaryProblem,
    ShootingOptions, Targets,
};
use mkdv_similarity::erp2::{ermakov_invariant, IntegrationOptions};
use mkdv_similarity::reduction::{CouplingSpec, SystemParams};
use mkdv_similarity::Error;

fn reference() -> (MovingBoundaryProblem, SystemParams, CouplingSpec) {
    let params = SystemParams::solvable(1.0, 1.0, 1.0).unwrap();
    let coupling = CouplingSpec::lorentzian(1.0);
    let geometry = Geometry::new(0.5, 1.5, 1.0).unwrap();
    let mbp = MovingBoundaryProblem::build(
        geometry,
        [0.86, 1.84, 0.8, 1.9],
        params,
        coupling.clone(),
        IntegrationOptions::new(1e-12),
    )
    .unwrap();
    (mbp, params, coupling)
}

#[test]
fn round_trip_recovers_start_and_constants() {
    let (mbp, params, coupling) = reference();
    let k = derive_constants(&mbp).unwrap();
    let s0 = mbp.profile().state_at(0.5).unwrap();
    let invariant = ermakov_invariant(&s0, &params, &coupling).unwrap();
    let options = ShootingOptions::new(Auxiliary::Invariant(invariant), IntegrationOptions::new(1e-12));
    let guess = FreeStart { phi_prime: 1.84, psi: 0.83, psi_prime: 1.85 };
    let out = shoot_for_targets(
        Targets { p_m: k.p_m, r_m: k.r_m },
        mbp.geometry(),
        params,
        &coupling,
        guess,
        &options,
    )
    .unwrap();
    assert!((out.start.psi - 0.8).abs() < 1e-8, "{:?}", out.start);
    assert!((out.start.psi_prime - 1.9).abs() < 1e-8, "{:?}", out.start);
    let k2 = derive_constants(&out.problem).unwrap();
    assert!((k2.p_m - k.p_m).abs() < 1e-8);
    assert!((k2.r_m - k.r_m).abs() < 1e-8);
    assert!(out.residual_history.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn condition_independent_of_unknowns_is_singular() {
    let (mbp, params, coupling) = reference();
    let k = derive_constants(&mbp).unwrap();
    let options = ShootingOptions::new(Auxiliary::PhiPrimeStart(1.84), IntegrationOptions::new(1e-12))
        .with_unknowns([FreeParameter::Psi, FreeParameter::PsiPrime]);
    let guess = FreeStart { phi_prime: 1.84, psi: 0.82, psi_prime: 1.95 };
    let out = shoot_for_targets(Targets { p_m: k.p_m, r_m: k.r_m }, mbp.geometry(), params, &coupling, guess, &options);
    // the slope condition does not involve the adjusted parameters
    match out {
        Err(Error::NoConvergence { reason, .. }) => assert!(reason.contains("singular"), "{reason}"),
        other => panic!("expected NoConvergence, got {other:?}"),
    }
}

#[test]
fn table_coupling_outside_its_range_does_not_converge() {
    let params = SystemParams::solvable(1.0, 1.0, 1.0).unwrap();
    let theta: Vec<f64> = (1..=20).map(|k| 0.1 * k as f64).collect();
    let j: Vec<f64> = theta.iter().map(|t| 1.0 / (1.0 + t * t)).collect();
    let coupling = CouplingSpec::table(theta, j, "positive ratios").unwrap();
    let geometry = Geometry::new(0.5, 1.5, 1.0).unwrap();
    let options = ShootingOptions::new(Auxiliary::PsiStart(0.8), IntegrationOptions::new(1e-10));
    // negative P_m makes Phi < 0 while Psi > 0, so theta < 0 is off the table
    let out = shoot_for_targets(
        Targets { p_m: -0.43, r_m: 1.0 },
        geometry,
        params,
        &coupling,
        FreeStart { phi_prime: 1.0, psi: 0.8, psi_prime: 1.0 },
        &options,
    );
    match out {
        Err(Error::NoConvergence { iterations, residual_history, .. }) => {
            assert_eq!(iterations, 0);
            assert!(residual_history.is_empty());
        }
        other => panic!("expected NoConvergence, got {other:?}"),
    }
}

#[test]
fn degenerate_geometry_is_rejected() {
    let params = SystemParams::solvable(1.0, 1.0, 1.0).unwrap();
    let coupling = CouplingSpec::lorentzian(1.0);
    let options = ShootingOptions::new(Auxiliary::PsiStart(0.8), IntegrationOptions::new(1e-10));
    let geometry = Geometry { gamma1: 1.0, gamma2: 1.0, a: 1.0 };
    let out = shoot_for_targets(
        Targets { p_m: 0.43, r_m: 1.0 },
        geometry,
        params,
        &coupling,
        FreeStart { phi_prime: 1.0, psi: 0.8, psi_prime: 1.0 },
        &options,
    );
    assert!(matches!(out, Err(Error::InvalidParameter(_))));
}
