//! Exact convergence-rate computation for a finite sketch distribution:
//! the rate rho, the expected-rank lower bound, and iteration estimates.

use sda::bench::generate_rank_deficient;
use sda::rates::rate_report;
use sda::sketch::SamplerSpec;
use sda::solver::ProjectionProblem;

fn main() -> sda::Result<()> {
    let a = generate_rank_deficient(40, 12, 3)?;
    let b = &a * nalgebra::DVector::from_element(40, 1.0);
    let problem = ProjectionProblem::standard(a, b)?;

    for (name, spec) in [
        (
            "uniform rows ",
            SamplerSpec::coordinate_uniform(problem.num_rows()),
        ),
        (
            "row-norm rows",
            SamplerSpec::coordinate_row_norm(problem.a())?,
        ),
    ] {
        let report = rate_report(&spec.discrete_support()?, &problem)?;
        println!("{name}: rho = {:.8}", report.rho);
        println!("  H nonsingular     = {}", report.h_nonsingular);
        println!("  lower bound       = {:.8}", report.lower_bound);
        println!("  rank(A)           = {}", report.rank_a);
        println!("  E[rank(S^T A)]    = {:.4}", report.expected_sketch_rank);
        for eps in [1e-2f64, 1e-4, 1e-8] {
            let k = if report.rho <= 0.0 {
                1.0
            } else {
                (eps.ln() / report.rho.ln()).ceil()
            };
            println!("  k({eps:.0e})           = {k}");
        }
    }
    Ok(())
}
