//! Randomized Kaczmarz on a small consistent system: build the problem,
//! run the solver with row-norm sampling, and print the convergence trace.

use nalgebra::{dmatrix, dvector};
use sda::sketch::SamplerSpec;
use sda::solver::{solve, ProjectionProblem, SolveOptions, Start};

fn main() -> sda::Result<()> {
    let a = dmatrix![
        2.0, 1.0, 0.0;
        1.0, 3.0, 1.0;
        0.0, 1.0, 2.0;
        1.0, 1.0, 1.0;
    ];
    let x_true = dvector![1.0, -1.0, 2.0];
    let b = &a * &x_true;
    let problem = ProjectionProblem::standard(a, b)?;

    let spec = SamplerSpec::coordinate_row_norm(problem.a())?;
    let mut options = SolveOptions::new(7);
    options.max_iters = 2_000;
    options.record_every = 100;

    let report = solve(
        &problem,
        &spec,
        &options,
        Start::Dual(nalgebra::DVector::zeros(problem.num_rows())),
    )?;

    println!("{:>6}  {:>12}  {:>12}", "k", "error^2", "residual");
    for row in &report.trace {
        println!("{:>6}  {:>12.3e}  {:>12.3e}", row.k, row.error_sq, row.residual);
    }
    println!(
        "\nconverged = {}, iterations = {}",
        report.converged, report.iterations
    );
    println!("x      = {:?}", report.x.as_slice());
    println!("x_true = {:?}", x_true.as_slice());
    Ok(())
}
