// Solves the system directly by the method of lines on the mapped strip and
// measures the distance to the similarity solution under grid refinement.

use mkdv_similarity::boundary::{Geometry, MovingBoundaryProblem};
use mkdv_similarity::erp2::IntegrationOptions;
use mkdv_similarity::pde::{mol_direct_solve, relative_l2_distance, FieldGrid, MolResolution, MOL_ORDER};
use mkdv_similarity::reduction::{CouplingSpec, SimilarityParams, SystemParams};
use mkdv_similarity::Result;

pub fn run_example() -> Result<()> {
    let mbp = MovingBoundaryProblem::build(
        Geometry::new(-1.0, 1.0, 1.0)?,
        [1.07, -1.07, 0.85, 1.26],
        SystemParams::solvable(1.0, 1.0, 1.0)?,
        CouplingSpec::lorentzian(1.0),
        IntegrationOptions::new(1e-12),
    )?;
    let mut previous: Option<f64> = None;
    println!("{:>5}  {:>10}  {:>6}  (nominal order {MOL_ORDER})", "ny", "distance", "order");
    for ny in [101, 201, 401] {
        let res = MolResolution { ny, dt: 0.02, ..MolResolution::default() };
        let sol = mol_direct_solve(&mbp, &res)?;
        let exact = FieldGrid::sample(
            mbp.profile(),
            &SimilarityParams::canonical(),
            sol.fields.x_nodes.clone(),
            sol.fields.t_nodes.clone(),
        )?;
        let d = relative_l2_distance(&sol.fields, &exact, sol.fields.nt() - 1)?;
        let order = previous.map_or(String::from("-"), |p| format!("{:.3}", (p / d).log2()));
        println!("{ny:>5}  {d:>10.3e}  {order:>6}");
        previous = Some(d);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
