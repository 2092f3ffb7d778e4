//! Starting outside the affine span of the method: a primal start with a
//! component in Null(A) keeps that component forever, so the iterates
//! converge to the shifted point x* + t rather than to x*.

use nalgebra::DVector;
use sda::rates::shift_vector;
use sda::sketch::SamplerSpec;
use sda::solver::{solve, ProjectionProblem, SolveOptions, Start};

fn main() -> sda::Result<()> {
    let a = sda::bench::generate_rank_deficient(20, 6, 9)?;
    let b = &a * DVector::from_element(20, 1.0);
    let problem = ProjectionProblem::standard(a, b)?;

    // A start with a deliberate null-space component.
    let x0 = DVector::from_fn(20, |i, _| if i % 3 == 0 { 2.0 } else { -1.0 });
    let t = shift_vector(&x0, &problem);
    println!("|t| = {:.6} (the part of x0 the iteration can never remove)", t.norm());

    let spec = SamplerSpec::coordinate_row_norm(problem.a())?;
    let mut options = SolveOptions::new(3);
    options.max_iters = 100_000;
    let report = solve(&problem, &spec, &options, Start::Primal(x0))?;

    let target = &report.reference.x_star + &t;
    println!(
        "|x_final - (x* + t)| = {:.3e}",
        (&report.x - &target).norm()
    );
    println!(
        "|x_final - x*|       = {:.3e}  (stays at |t| = {:.6})",
        (&report.x - &report.reference.x_star).norm(),
        t.norm()
    );
    println!(
        "residual |A x - b|   = {:.3e}  (x* + t solves the system too)",
        (problem.a() * &report.x - problem.rhs()).norm()
    );
    Ok(())
}
