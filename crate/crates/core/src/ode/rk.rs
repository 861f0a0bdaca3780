use crate::error::Error;

/// Butcher tableau of an explicit embedded pair with the first-same-as-last
/// property.
#[derive(Debug)]
pub struct Tableau {
    pub name: &'static str,
    pub c: &'static [f64],
    pub a: &'static [&'static [f64]],
    /// Weights of the propagated solution.
    pub b: &'static [f64],
    /// Weights of the embedded solution.
    pub b_hat: &'static [f64],
    /// Order of the propagated solution.
    pub order: u32,
    /// Order of the embedded solution used for error estimation.
    pub embedded_order: u32,
}

impl Tableau {
    fn stages(&self) -> usize {
        self.c.len()
    }
}

pub const DORMAND_PRINCE_54: Tableau = Tableau {
    name: "dormand-prince-5(4)",
    c: &[0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0],
    a: &[
        &[],
        &[1.0 / 5.0],
        &[3.0 / 40.0, 9.0 / 40.0],
        &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
        &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
        &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
        &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ],
    b: &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0],
    b_hat: &[
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ],
    order: 5,
    embedded_order: 4,
};

pub const BOGACKI_SHAMPINE_32: Tableau = Tableau {
    name: "bogacki-shampine-3(2)",
    c: &[0.0, 1.0 / 2.0, 3.0 / 4.0, 1.0],
    a: &[&[], &[1.0 / 2.0], &[0.0, 3.0 / 4.0], &[2.0 / 9.0, 1.0 / 3.0, 4.0 / 9.0]],
    b: &[2.0 / 9.0, 1.0 / 3.0, 4.0 / 9.0, 0.0],
    b_hat: &[7.0 / 24.0, 1.0 / 4.0, 1.0 / 3.0, 1.0 / 8.0],
    order: 3,
    embedded_order: 2,
};

/// Step-size control settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    /// Mixed absolute/relative local error tolerance.
    pub tol: f64,
    pub max_step: Option<f64>,
    pub initial_step: Option<f64>,
    pub max_steps: usize,
    /// Stop once any state component exceeds this magnitude.
    pub blowup: Option<f64>,
}

impl StepControl {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            max_step: None,
            initial_step: None,
            max_steps: 1_000_000,
            blowup: None,
        }
    }

    pub fn with_max_step(mut self, h: f64) -> Self {
        self.max_step = Some(h);
        self
    }

    pub fn with_blowup(mut self, threshold: f64) -> Self {
        self.blowup = Some(threshold);
        self
    }
}

/// An accepted solver point: position, state and state derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct Knot {
    pub x: f64,
    pub y: Vec<f64>,
    pub dy: Vec<f64>,
}

/// Why an integration stopped before its end point.
#[derive(Debug)]
pub enum Halt {
    Underflow { x: f64, h: f64 },
    Rhs { x: f64, error: Error },
    Blowup { x: f64 },
    TooManySteps(usize),
}

/// Knots accepted before the integration halted.
#[derive(Debug)]
pub struct PartialTrajectory {
    pub halt: Halt,
    pub knots: Vec<Knot>,
}

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;

/// Adaptive integration of `y' = f(x, y)` from `x0` to `x_end` with PI step
/// control. Returns every accepted knot, including both end points.
pub fn integrate<F>(
    tableau: &Tableau,
    mut rhs: F,
    x0: f64,
    y0: &[f64],
    x_end: f64,
    control: &StepControl,
) -> Result<Vec<Knot>, PartialTrajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<(), Error>,
{
    let dim = y0.len();
    let mut f0 = vec![0.0; dim];
    if let Err(error) = rhs(x0, y0, &mut f0) {
        return Err(PartialTrajectory {
            halt: Halt::Rhs { x: x0, error },
            knots: Vec::new(),
        });
    }
    let mut knots = vec![Knot {
        x: x0,
        y: y0.to_vec(),
        dy: f0.clone(),
    }];
    if x_end == x0 {
        return Ok(knots);
    }

    let dir = (x_end - x0).signum();
    let span = (x_end - x0).abs();
    let tol = control.tol;
    let max_step = control.max_step.unwrap_or(span).min(span);
    let alpha = 1.0 / (tableau.embedded_order as f64 + 1.0) - 0.75 * BETA;

    let scale = |y: &[f64], i: usize| tol + tol * y[i].abs();
    let mut h = control
        .initial_step
        .unwrap_or_else(|| initial_step(tableau, &mut rhs, x0, y0, &f0, tol, &scale))
        .min(max_step);

    let s = tableau.stages();
    let mut k = vec![vec![0.0; dim]; s];
    let mut y_stage = vec![0.0; dim];
    let mut y_new = vec![0.0; dim];
    let mut x = x0;
    let mut y = y0.to_vec();
    let mut err_old: f64 = 1e-4;
    let mut rejected = false;
    let mut last_rhs_error: Option<Error> = None;

    for _ in 0..control.max_steps {
        let remaining = (x_end - x).abs();
        // absorb rounding slivers so the last step lands exactly on x_end
        if h >= remaining || remaining - h < 1e-10 * x_end.abs().max(1.0) {
            h = remaining;
        }
        if h < remaining && h < 1e-14 * x.abs().max(1.0) {
            let halt = match last_rhs_error.take() {
                Some(error) => Halt::Rhs { x, error },
                None => Halt::Underflow { x, h },
            };
            return Err(PartialTrajectory { halt, knots });
        }
        let step = dir * h;

        // stage evaluation; k[0] is the derivative at the current knot
        k[0].copy_from_slice(&knots.last().expect("nonempty").dy);
        let mut stage_failed = None;
        for st in 1..s {
            for i in 0..dim {
                let mut acc = 0.0;
                for (j, aij) in tableau.a[st].iter().enumerate() {
                    acc += aij * k[j][i];
                }
                y_stage[i] = y[i] + step * acc;
            }
            let (head, tail) = k.split_at_mut(st);
            let _ = head;
            if let Err(e) = rhs(x + tableau.c[st] * step, &y_stage, &mut tail[0]) {
                stage_failed = Some(e);
                break;
            }
            if tail[0].iter().any(|v| !v.is_finite()) {
                stage_failed = Some(Error::InvalidParameter("non-finite derivative".into()));
                break;
            }
        }
        if let Some(e) = stage_failed {
            last_rhs_error = Some(e);
            h *= 0.25;
            rejected = true;
            continue;
        }

        let mut err_sq = 0.0;
        for i in 0..dim {
            let mut sol = 0.0;
            let mut est = 0.0;
            for j in 0..s {
                sol += tableau.b[j] * k[j][i];
                est += (tableau.b[j] - tableau.b_hat[j]) * k[j][i];
            }
            y_new[i] = y[i] + step * sol;
            let sc = scale(&y, i).max(scale(&y_new, i));
            err_sq += (step * est / sc).powi(2);
        }
        let err = (err_sq / dim as f64).sqrt();

        if err.is_finite() && err <= 1.0 && y_new.iter().all(|v| v.is_finite()) {
            // FSAL tableaus carry the derivative at the new point in the last stage
            let mut f_new = vec![0.0; dim];
            let fsal = tableau.a[s - 1] == &tableau.b[..s - 1] && tableau.c[s - 1] == 1.0;
            if fsal {
                f_new.copy_from_slice(&k[s - 1]);
            } else if let Err(e) = rhs(x + step, &y_new, &mut f_new) {
                last_rhs_error = Some(e);
                h *= 0.25;
                rejected = true;
                continue;
            }
            x = if h == remaining { x_end } else { x + step };
            y.copy_from_slice(&y_new);
            knots.push(Knot {
                x,
                y: y.clone(),
                dy: f_new,
            });
            last_rhs_error = None;
            if let Some(limit) = control.blowup {
                if y.iter().any(|v| v.abs() > limit) {
                    return Err(PartialTrajectory {
                        halt: Halt::Blowup { x },
                        knots,
                    });
                }
            }
            if x == x_end {
                return Ok(knots);
            }
            let mut fac = SAFETY * err.max(1e-10).powf(-alpha) * err_old.powf(BETA);
            fac = fac.clamp(FAC_MIN, FAC_MAX);
            if rejected {
                fac = fac.min(1.0);
            }
            err_old = err.max(1e-4);
            rejected = false;
            h = (h * fac).min(max_step);
        } else {
            let fac = if err.is_finite() {
                (SAFETY * err.powf(-alpha)).max(FAC_MIN)
            } else {
                0.1
            };
            h *= fac;
            rejected = true;
        }
    }
    Err(PartialTrajectory {
        halt: Halt::TooManySteps(control.max_steps),
        knots,
    })
}

fn initial_step<F, S>(
    tableau: &Tableau,
    rhs: &mut F,
    x0: f64,
    y0: &[f64],
    f0: &[f64],
    tol: f64,
    scale: &S,
) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<(), Error>,
    S: Fn(&[f64], usize) -> f64,
{
    let dim = y0.len() as f64;
    let norm = |v: &[f64]| -> f64 {
        (v.iter()
            .enumerate()
            .map(|(i, x)| (x / scale(y0, i)).powi(2))
            .sum::<f64>()
            / dim)
            .sqrt()
    };
    let d0 = norm(y0);
    let d1 = norm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1: Vec<f64> = y0.iter().zip(f0).map(|(y, f)| y + h0 * f).collect();
    let mut f1 = vec![0.0; y0.len()];
    if rhs(x0 + h0, &y1, &mut f1).is_err() {
        return h0;
    }
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = norm(&diff) / h0;
    let order = tableau.order as f64;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / (order + 1.0))
    };
    let _ = tol;
    (100.0 * h0).min(h1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic(_x: f64, y: &[f64], dy: &mut [f64]) -> Result<(), Error> {
        dy[0] = y[1];
        dy[1] = -y[0];
        Ok(())
    }

    #[test]
    fn weights_are_consistent() {
        for t in [&DORMAND_PRINCE_54, &BOGACKI_SHAMPINE_32] {
            let sb: f64 = t.b.iter().sum();
            let sbh: f64 = t.b_hat.iter().sum();
            assert!((sb - 1.0).abs() < 1e-14, "{}", t.name);
            assert!((sbh - 1.0).abs() < 1e-14, "{}", t.name);
            for (i, row) in t.a.iter().enumerate() {
                let s: f64 = row.iter().sum();
                assert!((s - t.c[i]).abs() < 1e-14, "{} row {i}", t.name);
            }
        }
    }

    #[test]
    fn harmonic_oscillator_both_pairs() {
        for (t, tol, bound) in [(&DORMAND_PRINCE_54, 1e-10, 1e-8), (&BOGACKI_SHAMPINE_32, 1e-10, 1e-7)] {
            let knots = integrate(t, harmonic, 0.0, &[1.0, 0.0], 10.0, &StepControl::new(tol)).unwrap();
            let last = knots.last().unwrap();
            assert_eq!(last.x, 10.0);
            assert!((last.y[0] - 10f64.cos()).abs() < bound, "{}", t.name);
            assert!((last.y[1] + 10f64.sin()).abs() < bound, "{}", t.name);
        }
    }

    #[test]
    fn backward_integration() {
        let knots = integrate(&DORMAND_PRINCE_54, harmonic, 1.0, &[1f64.cos(), -1f64.sin()], -2.0, &StepControl::new(1e-11)).unwrap();
        let last = knots.last().unwrap();
        assert_eq!(last.x, -2.0);
        assert!((last.y[0] - (-2f64).cos()).abs() < 1e-9);
        assert!(knots.windows(2).all(|w| w[1].x < w[0].x));
    }

    #[test]
    fn empty_interval_returns_single_knot() {
        let knots = integrate(&DORMAND_PRINCE_54, harmonic, 0.5, &[1.0, 2.0], 0.5, &StepControl::new(1e-8)).unwrap();
        assert_eq!(knots.len(), 1);
        assert_eq!(knots[0].y, vec![1.0, 2.0]);
    }

    #[test]
    fn max_step_is_respected() {
        let knots = integrate(&DORMAND_PRINCE_54, harmonic, 0.0, &[1.0, 0.0], 1.0, &StepControl::new(1e-6).with_max_step(0.01)).unwrap();
        assert!(knots.windows(2).all(|w| w[1].x - w[0].x <= 0.01 + 1e-15));
    }

    #[test]
    fn blowup_halts() {
        // y' = y^2 blows up at x = 1
        let res = integrate(
            &DORMAND_PRINCE_54,
            |_x, y: &[f64], dy: &mut [f64]| {
                dy[0] = y[0] * y[0];
                Ok(())
            },
            0.0,
            &[1.0],
            2.0,
            &StepControl::new(1e-10).with_blowup(1e6),
        );
        let partial = res.unwrap_err();
        match partial.halt {
            Halt::Blowup { x } => assert!((x - 1.0).abs() < 1e-5),
            other => panic!("unexpected halt {other:?}"),
        }
    }

    #[test]
    fn dormand_prince_converges_at_fifth_order() {
        // fixed steps through max_step with a loose tolerance
        let err = |h: f64| {
            let ctl = StepControl {
                tol: 1.0,
                max_step: Some(h),
                initial_step: Some(h),
                max_steps: 100_000,
                blowup: None,
            };
            let k = integrate(&DORMAND_PRINCE_54, harmonic, 0.0, &[1.0, 0.0], 2.0, &ctl).unwrap();
            (k.last().unwrap().y[0] - 2f64.cos()).abs()
        };
        let ratio = err(0.1) / err(0.05);
        assert!(ratio > 24.0 && ratio < 40.0, "ratio {ratio}");
    }
}
