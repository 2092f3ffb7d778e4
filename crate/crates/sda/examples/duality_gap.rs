//! Duality-gap certification: the dual iterate gives a computable bound on
//! suboptimality, and the stopping rule pairs the gap with the residual
//! (the gap alone certifies nothing because the linked primal point can be
//! infeasible).

use nalgebra::DVector;
use sda::sketch::SamplerSpec;
use sda::solver::{solve, ProjectionProblem, SolveOptions, Start};

fn main() -> sda::Result<()> {
    let a = sda::bench::generate_rank_deficient(30, 10, 2)?;
    let x_true = DVector::from_fn(30, |i, _| (i as f64 * 0.37).sin());
    let b = &a * &x_true;
    let problem = ProjectionProblem::standard(a, b)?;

    let spec = SamplerSpec::coordinate_row_norm(problem.a())?;
    let mut options = SolveOptions::new(11);
    options.max_iters = 50_000;
    options.record_every = 500;
    options.gap_check_period = 500;
    options.tol_gap = Some(1e-12);

    let report = solve(
        &problem,
        &spec,
        &options,
        Start::Dual(DVector::zeros(problem.num_rows())),
    )?;

    println!("{:>6}  {:>12}  {:>14}  {:>12}", "k", "residual", "dual value", "gap");
    for row in &report.trace {
        let gap = row.gap.map_or("-".to_string(), |g| format!("{g:.3e}"));
        println!(
            "{:>6}  {:>12.3e}  {:>14.8}  {:>12}",
            row.k,
            row.residual,
            row.dual_value.unwrap_or(f64::NAN),
            gap
        );
    }
    println!(
        "\nconverged = {} after {} iterations; optimal value = {:.8}",
        report.converged, report.iterations, report.reference.opt
    );
    Ok(())
}
