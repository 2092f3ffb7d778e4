//! A tour of the sketch distributions: what the sampled matrices look like
//! and how the choice of sketch changes the update.

use nalgebra::DVector;
use sda::sketch::{Sampler, SamplerSpec};
use sda::solver::{primal_step, ProjectionProblem};

fn main() -> sda::Result<()> {
    let a = sda::bench::generate_rank_deficient(8, 5, 4)?;
    let b = &a * DVector::from_element(8, 1.0);
    let problem = ProjectionProblem::standard(a, b)?;
    let m = problem.num_rows();

    let zoo: Vec<(&str, SamplerSpec)> = vec![
        ("coordinate (uniform)", SamplerSpec::coordinate_uniform(m)),
        (
            "coordinate (row-norm)",
            SamplerSpec::coordinate_row_norm(problem.a())?,
        ),
        ("uniform blocks, size 3", SamplerSpec::UniformBlocks { rows: m, size: 3 }),
        ("count-sketch, 2 cols", SamplerSpec::CountSketch { rows: m, cols: 2 }),
        ("count-min, 2 cols", SamplerSpec::CountMin { rows: m, cols: 2 }),
        ("gaussian, 2 cols", SamplerSpec::Gaussian { rows: m, cols: 2 }),
    ];

    let x0 = DVector::zeros(problem.num_cols());
    for (name, spec) in zoo {
        let mut sampler = Sampler::new(spec.clone(), 17);
        let s = sampler.sample();
        let mut x = x0.clone();
        for _ in 0..200 {
            x = primal_step(&x, &sampler.sample(), &problem);
        }
        let resid = (problem.a() * &x - problem.rhs()).norm();
        println!(
            "{name:<24} sample shape {}x{}, residual after 200 steps = {resid:.3e}",
            s.num_rows(),
            s.num_cols()
        );
        let analysis = match spec.discrete_support() {
            Ok(dist) => format!("finite support of {} sketches", dist.len()),
            Err(_) => "exact rate analysis unavailable (sampled family)".to_string(),
        };
        println!("{:<24} {analysis}", "");
    }
    Ok(())
}
