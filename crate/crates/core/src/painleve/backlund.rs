use std::sync::Arc;

use super::jet::Jet;
use super::solution::{Direction, PiiSolution, PoleGuard, Representation, Sigma};
use crate::error::{Error, Result};

/// Grid resolution used to locate zeros of the transformation denominator.
const SCAN_POINTS: usize = 4000;

/// Image of a jet under the Lukashevich transformation (`sigma = +1`):
///
/// ```text
/// up:   w~ = -w - (2 alpha + 1) / (2 w' + 2 w^2 + z)
/// down: w~ = -w + (2 alpha - 1) / (2 w' - 2 w^2 - z)
/// ```
///
/// `w` must carry one more order than requested.
pub(crate) fn transform_jet(w: &Jet, z: f64, alpha: f64, direction: Direction, order: usize) -> Option<Jet> {
    let wp = w.derivative();
    let w = w.truncate(order);
    let wp = wp.truncate(order);
    let zj = Jet::variable(z, order);
    let sq = &w * &w;
    match direction {
        Direction::Up => {
            let coeff = 2.0 * alpha + 1.0;
            if coeff == 0.0 {
                return Some(-&w);
            }
            let d = &(&wp.scale(2.0) + &sq.scale(2.0)) + &zj;
            Some(&(-&w) - &d.recip()?.scale(coeff))
        }
        Direction::Down => {
            let coeff = 2.0 * alpha - 1.0;
            if coeff == 0.0 {
                return Some(-&w);
            }
            let d = &(&wp.scale(2.0) - &sq.scale(2.0)) - &zj;
            Some(&(-&w) + &d.recip()?.scale(coeff))
        }
    }
}

fn denominator(sol: &PiiSolution, z: f64, direction: Direction) -> Result<f64> {
    let (w, wp) = sol.eval(z)?;
    Ok(match direction {
        Direction::Up => 2.0 * wp + 2.0 * w * w + z,
        Direction::Down => 2.0 * wp - 2.0 * w * w - z,
    })
}

/// Lukashevich Backlund transformation, mapping a solution at `alpha_p` to
/// one at `alpha_p + 1` (up) or `alpha_p - 1` (down).
///
/// Zeros of the denominator inside `window` become pole guards of the image.
/// Only the focusing sign `sigma = +1` admits a real transformation.
pub fn lukashevich_bt(sol: &PiiSolution, direction: Direction, window: (f64, f64)) -> Result<PiiSolution> {
    if sol.sigma() != Sigma::Plus {
        return Err(Error::Backlund(
            "the real Lukashevich transformation exists only for sigma = +1".into(),
        ));
    }
    let (mut lo, mut hi) = window;
    if let Some((dlo, dhi)) = sol.domain() {
        lo = lo.max(dlo);
        hi = hi.min(dhi);
    }
    if !(hi > lo) {
        return Err(Error::Backlund(format!("empty evaluation window [{lo}, {hi}]")));
    }
    let coeff = match direction {
        Direction::Up => 2.0 * sol.alpha_p() + 1.0,
        Direction::Down => 2.0 * sol.alpha_p() - 1.0,
    };

    let mut guards = sol.pole_guards().to_vec();
    if coeff != 0.0 {
        let zs: Vec<f64> = (0..=SCAN_POINTS).map(|i| lo + (hi - lo) * i as f64 / SCAN_POINTS as f64).collect();
        let mut prev: Option<(f64, f64)> = None;
        for &z in &zs {
            if sol.is_guarded(z) {
                prev = None;
                continue;
            }
            let d = denominator(sol, z, direction)?;
            if d == 0.0 {
                guards.push(PoleGuard::around(z));
            } else if let Some((zp, dp)) = prev {
                if dp.signum() != d.signum() {
                    guards.push(PoleGuard::around(bisect(sol, direction, zp, z, dp)?));
                }
            }
            prev = Some((z, d));
        }
    }
    guards.sort_by(|a, b| a.center.total_cmp(&b.center));

    let covered = {
        let step = (hi - lo) / 1000.0;
        (0..=1000).all(|i| {
            let z = lo + step * i as f64;
            guards.iter().any(|g| g.contains(z))
        })
    };
    if covered {
        return Err(Error::Backlund(format!("denominator zeros cover the whole window [{lo}, {hi}]")));
    }

    let alpha_p = match direction {
        Direction::Up => sol.alpha_p() + 1.0,
        Direction::Down => sol.alpha_p() - 1.0,
    };
    Ok(PiiSolution {
        alpha_p,
        sigma: sol.sigma(),
        kind: sol.kind(),
        repr: Representation::Backlund { base: Arc::new(sol.clone()), direction },
        pole_guards: guards,
        domain: sol.domain(),
    })
}

fn bisect(sol: &PiiSolution, direction: Direction, mut a: f64, mut b: f64, mut da: f64) -> Result<f64> {
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        let dm = denominator(sol, m, direction)?;
        if dm == 0.0 {
            return Ok(m);
        }
        if dm.signum() == da.signum() {
            a = m;
            da = dm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Seed followed by `n` successive upward transformations.
pub fn backlund_hierarchy(seed: &PiiSolution, n: usize, window: (f64, f64)) -> Result<Vec<PiiSolution>> {
    let mut chain = vec![seed.clone()];
    for _ in 0..n {
        let next = lukashevich_bt(chain.last().expect("nonempty"), Direction::Up, window)?;
        chain.push(next);
    }
    Ok(chain)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_image_of_zero_is_minus_one_over_z() {
        let w1 = lukashevich_bt(&PiiSolution::zero(Sigma::Plus), Direction::Up, (-5.0, 5.0)).unwrap();
        assert_eq!(w1.alpha_p(), 1.0);
        for z in [0.5, 1.0, 2.0, -3.0] {
            let (w, wp) = w1.eval(z).unwrap();
            assert!((w + 1.0 / z).abs() < 1e-15);
            assert!((wp - 1.0 / (z * z)).abs() < 1e-14);
        }
        // the denominator z vanishes at the origin
        assert_eq!(w1.pole_guards().len(), 1);
        assert!(w1.pole_guards()[0].center.abs() < 1e-12);
    }

    #[test]
    fn down_after_up_returns_seed() {
        let seed = PiiSolution::zero(Sigma::Plus);
        let up = lukashevich_bt(&seed, Direction::Up, (-5.0, 5.0)).unwrap();
        let back = lukashevich_bt(&up, Direction::Down, (-5.0, 5.0)).unwrap();
        assert_eq!(back.alpha_p(), 0.0);
        for z in [0.5, 1.7, -2.2, 4.0] {
            let (w, wp) = back.eval(z).unwrap();
            assert!(w.abs() < 1e-14 && wp.abs() < 1e-13, "z = {z}: {w} {wp}");
        }
    }

    #[test]
    fn defocusing_sign_is_refused() {
        assert!(matches!(
            lukashevich_bt(&PiiSolution::zero(Sigma::Minus), Direction::Up, (-1.0, 1.0)),
            Err(Error::Backlund(_))
        ));
    }

    #[test]
    fn half_integer_parameter_maps_to_negation() {
        // 2 alpha + 1 = 0: the image is -w, with no new guards
        let (s, _) = super::super::solution::pii_integrate_tracking(0.0, 0.3, 0.1, -0.5, Sigma::Plus, 2.0, 1e-10).unwrap();
        let img = lukashevich_bt(&s, Direction::Up, (0.0, 2.0)).unwrap();
        assert!(img.pole_guards().is_empty());
        let (w, _) = s.eval(1.0).unwrap();
        let (wi, _) = img.eval(1.0).unwrap();
        assert!((w + wi).abs() < 1e-15);
    }
}
