//! How the block size trades per-step cost against the convergence rate:
//! enumerating all row subsets of size tau gives the exact rate for each
//! block variant, up to the full-system Newton step (tau = m, one shot).

use sda::linalg;
use sda::rates::rate_rho;
use sda::sketch::{compute_h, SamplerSpec};
use sda::solver::ProjectionProblem;

/// All subsets of {0, .., m-1} of the given size.
fn subsets(m: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn recurse(start: usize, m: usize, size: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == size {
            out.push(current.clone());
            return;
        }
        for i in start..m {
            current.push(i);
            recurse(i + 1, m, size, current, out);
            current.pop();
        }
    }
    recurse(0, m, size, &mut current, &mut out);
    out
}

fn main() -> sda::Result<()> {
    let a = sda::bench::generate_rank_deficient(6, 4, 1)?;
    let b = &a * nalgebra::DVector::from_element(6, 1.0);
    let problem = ProjectionProblem::standard(a, b)?;
    let m = problem.num_rows();
    println!("m = {m}, rank(A) = {}", linalg::rank(problem.a()));

    for tau in 1..=m {
        let family = subsets(m, tau);
        let p = 1.0 / family.len() as f64;
        let probs = vec![p; family.len()];
        let spec = SamplerSpec::blocks(m, family, probs);
        let h = compute_h(&spec.discrete_support()?, &problem);
        let rho = rate_rho(&problem, &h)?;
        println!("tau = {tau}: rho = {rho:.10}");
    }
    println!("(tau = m is the exact Newton step: it converges in one iteration)");
    Ok(())
}
