//! Self-duality: for a positive definite system solved in its own metric
//! (B = A, c = 0), the primal and dual iterates coincide, and the rate has
//! the closed form 1 - lambda_min(A) / Tr(A).

use nalgebra::{DMatrix, DVector};
use sda::linalg::SpdMatrix;
use sda::rates::selfdual_rate;
use sda::sketch::{sample, SamplerSpec};
use sda::solver::{dual_step, ProjectionProblem, SolverState};

fn main() -> sda::Result<()> {
    let n = 8;
    let m = DMatrix::from_fn(n, n, |i, j| ((i * 7 + j * 3) as f64 * 0.61).sin());
    let a = &m * m.transpose() + DMatrix::identity(n, n);
    let b = &a * DVector::from_element(n, 1.0);
    let problem = ProjectionProblem::new(
        a.clone(),
        b,
        SpdMatrix::new(a.clone())?,
        DVector::zeros(n),
    )?;

    println!("closed-form rate 1 - lambda_min(A)/Tr(A) = {:.8}", selfdual_rate(&a)?);

    let spec = SamplerSpec::coordinate_uniform(n);
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(5);
    let mut state = SolverState::from_dual(DVector::zeros(n), &problem);
    let mut max_dev: f64 = 0.0;
    for k in 1..=200 {
        state = dual_step(&state, &sample(&spec, &mut rng), &problem);
        max_dev = max_dev.max((&state.x - &state.y).amax());
        if k % 50 == 0 {
            println!(
                "k = {k:>3}: |x - y|_inf = {:.2e}, residual = {:.3e}",
                (&state.x - &state.y).amax(),
                (problem.a() * &state.x - problem.rhs()).norm()
            );
        }
    }
    println!("\nmax |x^k - y^k| over the whole run = {max_dev:.2e}");
    Ok(())
}
