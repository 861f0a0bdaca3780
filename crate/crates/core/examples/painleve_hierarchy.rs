// Builds rational Painleve II solutions from w = 0 by repeated Backlund
// transformations and checks them against the equation.

use mkdv_similarity::painleve::{backlund_hierarchy, lukashevich_bt, Direction, PiiSolution, Sigma};
use mkdv_similarity::Result;

pub fn run_example() -> Result<()> {
    let window = (-5.0, 5.0);
    let chain = backlund_hierarchy(&PiiSolution::zero(Sigma::Plus), 5, window)?;
    let zs: Vec<f64> = (0..=200).map(|k| -5.0 + 0.05 * k as f64).collect();

    println!("{:>7}  {:>7}  {:>12}  {:>12}", "alpha", "poles", "w(2)", "residual");
    for sol in &chain {
        println!(
            "{:>7}  {:>7}  {:>12.8}  {:>12.2e}",
            sol.alpha_p(),
            sol.pole_guards().len(),
            sol.eval(2.0)?.0,
            sol.max_residual(&zs)?
        );
    }

    // the second member is 1/z - 3 z^2/(z^3 + 4)
    let (w, _) = chain[2].eval(1.5)?;
    println!("w2(1.5) = {w:.15} vs {:.15}", 1.0 / 1.5 - 3.0 * 2.25 / (3.375 + 4.0));

    let back = lukashevich_bt(&chain[3], Direction::Down, window)?;
    println!("down(up(w2)) - w2 at z = 1: {:.1e}", back.eval(1.0)?.0 - chain[2].eval(1.0)?.0);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
