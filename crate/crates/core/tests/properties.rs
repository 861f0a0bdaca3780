use mkdv_similarity::erp2::{invariant_drift, IntegrationOptions, ReducedProfile, ReducedState, ReducedSystem};
use mkdv_similarity::fd::DiffOperator;
use mkdv_similarity::painleve::{lukashevich_bt, pii_integrate_tracking, Direction, Sigma};
use mkdv_similarity::pde::BandMatrix;
use mkdv_similarity::reduction::{reduce_exponents, CouplingSpec, SystemParams, Verdict};
use mkdv_similarity::report::{format_float, read_columns, write_table};
use mkdv_similarity::Error;
use proptest::prelude::*;

fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

fn poly_derivative(c: &[f64], order: usize, x: f64) -> f64 {
    let mut d = c.to_vec();
    for _ in 0..order {
        d = d.iter().enumerate().skip(1).map(|(k, &v)| k as f64 * v).collect();
    }
    poly(&d, x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn centred_stencils_are_exact_on_polynomials(
        coeffs in prop::collection::vec(-2.0f64..2.0, 5),
        order in 1usize..=3,
    ) {
        // accuracy 4 centred stencils differentiate quartics exactly
        let n = 30;
        let h = 0.05;
        let xs: Vec<f64> = (0..n).map(|j| -0.7 + j as f64 * h).collect();
        let f: Vec<f64> = xs.iter().map(|&x| poly(&coeffs, x)).collect();
        let op = DiffOperator::new(n, order, 4, 2);
        for j in (0..n).filter(|&j| op.is_centred(j)) {
            let exact = poly_derivative(&coeffs, order, xs[j]);
            prop_assert!((op.at(&f, h, j) - exact).abs() < 1e-7 * (1.0 + exact.abs()));
        }
    }

    #[test]
    fn json_floats_round_trip(x in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO) {
        let text = format_float(x);
        let back: f64 = text.parse().unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn band_solver_matches_product(
        entries in prop::collection::vec(-1.0f64..1.0, 40 * 6),
        x in prop::collection::vec(-3.0f64..3.0, 40),
    ) {
        let n = 40;
        let (kl, ku) = (2, 3);
        let mut a = BandMatrix::zeros(n, kl, ku);
        let mut dense = vec![vec![0.0; n]; n];
        for i in 0..n {
            for (k, j) in (i.saturating_sub(kl)..(i + ku + 1).min(n)).enumerate() {
                // diagonal shift keeps the random matrix well conditioned
                let v = entries[i * 6 + k] + if i == j { 4.0 } else { 0.0 };
                a.add(i, j, v);
                dense[i][j] = v;
            }
        }
        let mut b: Vec<f64> = dense.iter().map(|r| r.iter().zip(&x).map(|(p, q)| p * q).sum()).collect();
        a.solve(&mut b).unwrap();
        for (u, v) in b.iter().zip(&x) {
            prop_assert!((u - v).abs() < 1e-10);
        }
    }

    #[test]
    fn only_mu_minus_two_reduces(mu in -4.0f64..0.0) {
        let p = SystemParams::new(1.0, 1.0, 1.0, mu).unwrap();
        let reducing = reduce_exponents(&p).verdict == Verdict::Reducing;
        prop_assert_eq!(reducing, mu == -2.0);
    }

    #[test]
    fn csv_tables_round_trip(rows in prop::collection::vec((-1e6f64..1e6, -1e6f64..1e6), 1..20)) {
        let dir = tempfile::TempDir::new().unwrap();
        let path = dir.path().join("t.csv");
        let data: Vec<Vec<f64>> = rows.iter().map(|&(a, b)| vec![a, b]).collect();
        write_table(&path, &["x", "y"], data).unwrap();
        prop_assert_eq!(read_columns(&path, "x", "y").unwrap(), rows);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn invariant_is_conserved_near_a_regular_profile(
        d in prop::array::uniform4(-0.03f64..0.03),
        which in 0usize..3,
    ) {
        let (coupling, start) = [
            (CouplingSpec::constant(1.0), [0.84, 2.4, 0.84, 1.64]),
            (CouplingSpec::quadratic(1.0), [0.86, 2.77, -0.86, -1.19]),
            (CouplingSpec::lorentzian(1.0), [0.86, 1.84, 0.8, 1.9]),
        ][which].clone();
        let params = SystemParams::solvable(1.0, 1.0, 1.0).unwrap();
        let s: Vec<f64> = start.iter().zip(d).map(|(a, b)| a + b).collect();
        let solved = ReducedProfile::solve(
            ReducedState::new(0.5, s[0], s[1], s[2], s[3]),
            1.5,
            ReducedSystem::new(params, coupling),
            IntegrationOptions::new(1e-10),
        );
        match solved {
            Ok(profile) => prop_assert!(invariant_drift(&profile).unwrap().max_drift <= 1e-8),
            Err(Error::SingularState { .. }) | Err(Error::SingularityBeforeEnd { .. }) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn backlund_images_solve_painleve_and_invert(
        w0 in -0.3f64..0.3,
        w0_prime in -0.3f64..0.3,
        alpha_p in -0.4f64..0.4,
    ) {
        let window = (0.0, 1.5);
        let (seed, pole) = pii_integrate_tracking(0.0, w0, w0_prime, alpha_p, Sigma::Plus, 1.5, 1e-12).unwrap();
        prop_assume!(pole.is_none());
        let up = lukashevich_bt(&seed, Direction::Up, window).unwrap();
        prop_assert!((up.alpha_p() - (alpha_p + 1.0)).abs() < 1e-15);
        let zs: Vec<f64> = (0..=30).map(|k| 0.05 * k as f64).collect();
        prop_assert!(up.max_residual(&zs).unwrap() <= 1e-8);
        let back = lukashevich_bt(&up, Direction::Down, window).unwrap();
        for &z in &zs {
            if back.is_guarded(z) || !back.in_domain(z) {
                continue;
            }
            let (w, _) = back.eval(z).unwrap();
            let (expected, _) = seed.eval(z).unwrap();
            prop_assert!((w - expected).abs() < 1e-9, "z = {z}: {w} vs {expected}");
        }
    }
}
