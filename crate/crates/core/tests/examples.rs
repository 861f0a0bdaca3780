mod reduced_profile {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/reduced_profile.rs"));
}

#[test]
fn reduced_profile_example_runs() {
    reduced_profile::run_example().expect("reduced profile example should run");
}

mod invariant_readings {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/invariant_readings.rs"));
}

#[test]
fn invariant_readings_example_runs() {
    invariant_readings::run_example().expect("invariant readings example should run");
}

mod painleve_hierarchy {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/painleve_hierarchy.rs"));
}

#[test]
fn painleve_hierarchy_example_runs() {
    painleve_hierarchy::run_example().expect("painleve hierarchy example should run");
}

mod moving_boundary {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/moving_boundary.rs"));
}

#[test]
fn moving_boundary_example_runs() {
    moving_boundary::run_example().expect("moving boundary example should run");
}

mod shooting {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/shooting.rs"));
}

#[test]
fn shooting_example_runs() {
    shooting::run_example().expect("shooting example should run");
}

mod pde_residual {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/pde_residual.rs"));
}

#[test]
fn pde_residual_example_runs() {
    pde_residual::run_example().expect("pde residual example should run");
}

mod direct_solve {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/direct_solve.rs"));
}

#[test]
fn direct_solve_example_runs() {
    direct_solve::run_example().expect("direct solve example should run");
}

mod decoupled {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/decoupled.rs"));
}

#[test]
fn decoupled_example_runs() {
    decoupled::run_example().expect("decoupled example should run");
}

mod airy_linear {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/airy_linear.rs"));
}

#[test]
fn airy_linear_example_runs() {
    airy_linear::run_example().expect("airy linear example should run");
}
