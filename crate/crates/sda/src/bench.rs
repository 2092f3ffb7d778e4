//! Benchmark harness: rank-deficient problem generation, repeated-trial
//! convergence runs with CSV output, and summary curves against the
//! theoretical rate.

use nalgebra::{DMatrix, DVector};
use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg;
use crate::rates;
use crate::sketch::{SamplerSpec, Sampler};
use crate::solver::{self, ProjectionProblem, SolverState};

/// Which randomized update the benchmark runs. Kaczmarz and coordinate
/// ascent use the same unit-coordinate sketches; they differ only in the
/// (primal versus dual) view of the same iterate sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Kaczmarz,
    CoordinateAscent,
    /// Uniformly random row subsets of the given size.
    Block { size: usize },
    CountSketch { cols: usize },
    CountMin { cols: usize },
    Gaussian { cols: usize },
}

/// How a row is selected for coordinate methods.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbabilityRule {
    Uniform,
    /// Probability proportional to the squared row norm.
    RowNorm,
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub method: Method,
    pub rule: ProbabilityRule,
    pub trials: usize,
    pub iterations: usize,
    pub record_every: usize,
    /// Trial `t` runs with seed `base_seed ^ t`, so trials are independent
    /// and individually reproducible.
    pub base_seed: u64,
}

impl BenchConfig {
    fn validate(&self) -> Result<()> {
        if self.trials == 0 || self.iterations == 0 || self.record_every == 0 {
            return Err(Error::InvalidArgument(
                "trials, iterations and record_every must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Draws an n-by-n matrix with i.i.d. uniform(0, 1) entries and truncates
/// its singular value decomposition to the `r` largest singular values.
/// Deterministic per seed.
pub fn generate_rank_deficient(n: usize, r: usize, seed: u64) -> Result<DMatrix<f64>> {
    if r == 0 || r > n {
        return Err(Error::InvalidArgument(format!(
            "rank {r} out of range 1..={n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let full = DMatrix::from_fn(n, n, |_, _| rng.gen::<f64>());
    if r == n {
        return Ok(full);
    }
    let svd = linalg::ThinSvd::new(&full);
    let mut out = DMatrix::zeros(n, n);
    for i in 0..r {
        out += svd.sigma[i] * svd.u.column(i) * svd.v.column(i).transpose();
    }
    Ok(out)
}

/// The sketch distribution a benchmark method corresponds to.
pub fn sampler_spec(method: Method, rule: ProbabilityRule, a: &DMatrix<f64>) -> Result<SamplerSpec> {
    let m = a.nrows();
    let coordinate = |rule| match rule {
        ProbabilityRule::Uniform => Ok(SamplerSpec::coordinate_uniform(m)),
        ProbabilityRule::RowNorm => SamplerSpec::coordinate_row_norm(a),
    };
    match method {
        Method::Kaczmarz | Method::CoordinateAscent => coordinate(rule),
        Method::Block { size } => {
            if size == 0 || size > m {
                return Err(Error::InvalidArgument(format!(
                    "block size {size} out of range 1..={m}"
                )));
            }
            Ok(SamplerSpec::UniformBlocks { rows: m, size })
        }
        Method::CountSketch { cols } => Ok(SamplerSpec::CountSketch { rows: m, cols }),
        Method::CountMin { cols } => Ok(SamplerSpec::CountMin { rows: m, cols }),
        Method::Gaussian { cols } => Ok(SamplerSpec::Gaussian { rows: m, cols }),
    }
}

/// One recorded benchmark row.
#[derive(Clone, Debug)]
pub struct BenchRow {
    pub trial: usize,
    pub k: usize,
    /// `|x^k - x*|_2^2 / |x^0 - x*|_2^2` (the start is `x^0 = 0`, which
    /// lies in the range space, so the shift term vanishes).
    pub rel_error: f64,
    pub residual: f64,
    pub dual_value: f64,
    pub gap: f64,
}

/// Benchmark outcome: the per-trial rows, the formatted CSVs and the rate
/// used for the theoretical curve (absent for non-discrete sketches).
#[derive(Clone, Debug)]
pub struct BenchOutput {
    pub rows: Vec<BenchRow>,
    pub csv: String,
    pub summary_csv: String,
    pub rho: Option<f64>,
    pub rank_a: usize,
}

/// Which iterations get a CSV row: 0, every `record_every`-th, and the last.
fn recorded_iterations(iterations: usize, record_every: usize) -> Vec<usize> {
    let mut ks: Vec<usize> = (0..=iterations).step_by(record_every).collect();
    if *ks.last().unwrap() != iterations {
        ks.push(iterations);
    }
    ks
}

/// Runs `config.trials` independent trials of the configured method on the
/// consistent system `A x = A x_true` with `x_true` standard normal,
/// starting from `x^0 = 0` with `B = I`, `c = 0`.
pub fn run_benchmark(a: DMatrix<f64>, config: &BenchConfig) -> Result<BenchOutput> {
    config.validate()?;
    let n = a.ncols();

    // The right-hand side is synthesized from a reference solution so the
    // system is consistent by construction.
    let mut rng = ChaCha8Rng::seed_from_u64(config.base_seed);
    rng.set_stream(u64::MAX); // keep x_true independent of trial streams
    let x_true = DVector::from_fn(n, |_, _| {
        rng.sample::<f64, _>(rand_distr::StandardNormal)
    });
    let b = &a * &x_true;
    let spec = sampler_spec(config.method, config.rule, &a)?;
    spec.validate()?;
    let problem = ProjectionProblem::standard(a, b)?;

    let x0 = DVector::zeros(n);
    let reference = solver::reference_solution(&problem, &x0)?;
    let denom = reference.x_star.norm_squared();
    if denom == 0.0 {
        return Err(Error::InvalidArgument(
            "degenerate benchmark: x* = x0 = 0".into(),
        ));
    }

    let rank_a = linalg::rank(problem.a());
    let rho = match spec.discrete_support() {
        Ok(dist) => {
            let h = crate::sketch::compute_h(&dist, &problem);
            Some(rates::rate_rho(&problem, &h)?)
        }
        Err(_) => None,
    };

    let ks = recorded_iterations(config.iterations, config.record_every);
    let mut rows = Vec::with_capacity(config.trials * ks.len());
    for trial in 0..config.trials {
        let seed = config.base_seed ^ trial as u64;
        let trial_rows = match &spec {
            SamplerSpec::Coordinate { probs } => {
                run_coordinate_trial(&problem, probs, &reference.x_star, denom, &ks, trial, seed)
            }
            _ => run_generic_trial(&problem, &spec, &reference.x_star, denom, &ks, trial, seed),
        };
        rows.extend(trial_rows);
    }
    rows.sort_by(|p, q| (p.trial, p.k).cmp(&(q.trial, q.k)));

    let csv = format_rows_csv(&rows);
    let summary_csv = format_summary_csv(&rows, &ks, config, rho, rank_a);
    Ok(BenchOutput {
        rows,
        csv,
        summary_csv,
        rho,
        rank_a,
    })
}

/// Fast path for unit-coordinate sketches with `B = I`, `c = 0`: each step
/// touches one row of `A`, so the per-step cost is `O(n)` instead of the
/// generic `O(mn)`.
fn run_coordinate_trial(
    problem: &ProjectionProblem,
    probs: &[f64],
    x_star: &DVector<f64>,
    denom: f64,
    ks: &[usize],
    trial: usize,
    seed: u64,
) -> Vec<BenchRow> {
    let a = problem.a();
    let b = problem.rhs();
    let row_norms2: Vec<f64> = (0..a.nrows()).map(|i| a.row(i).norm_squared()).collect();
    let dist = WeightedIndex::new(probs).expect("probabilities validated");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut x = DVector::zeros(a.ncols());
    let mut y = DVector::zeros(a.nrows());
    let mut rows = Vec::with_capacity(ks.len());
    let mut next = 0;
    for k in 0..=*ks.last().unwrap() {
        if k > 0 {
            let i = dist.sample(&mut rng);
            if row_norms2[i] > 0.0 {
                let lambda = (b[i] - a.row(i).dot(&x.transpose())) / row_norms2[i];
                y[i] += lambda;
                x += lambda * a.row(i).transpose();
            }
        }
        if k == ks[next] {
            // With B = I and c = 0 the linkage gives A^T y = x, so the dual
            // value and the gap reduce to inner products of maintained state.
            let dual_value = b.dot(&y) - 0.5 * x.norm_squared();
            let gap = x.norm_squared() - b.dot(&y);
            rows.push(BenchRow {
                trial,
                k,
                rel_error: (&x - x_star).norm_squared() / denom,
                residual: (a * &x - b).norm(),
                dual_value,
                gap,
            });
            next += 1;
        }
    }
    rows
}

fn run_generic_trial(
    problem: &ProjectionProblem,
    spec: &SamplerSpec,
    x_star: &DVector<f64>,
    denom: f64,
    ks: &[usize],
    trial: usize,
    seed: u64,
) -> Vec<BenchRow> {
    let mut sampler = Sampler::new(spec.clone(), seed);
    let mut state = SolverState::from_dual(DVector::zeros(problem.num_rows()), problem);
    let mut rows = Vec::with_capacity(ks.len());
    let mut next = 0;
    for k in 0..=*ks.last().unwrap() {
        if k > 0 {
            let s = sampler.sample();
            state = solver::dual_step(&state, &s, problem);
        }
        if k == ks[next] {
            rows.push(BenchRow {
                trial,
                k,
                rel_error: (&state.x - x_star).norm_squared() / denom,
                residual: (problem.a() * &state.x - problem.rhs()).norm(),
                dual_value: solver::dual_value(&state.y, problem),
                gap: solver::duality_gap(&state.y, problem),
            });
            next += 1;
        }
    }
    rows
}

fn format_rows_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("trial,k,rel_error,residual,dual_value,gap\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.trial, r.k, r.rel_error, r.residual, r.dual_value, r.gap
        ));
    }
    out
}

/// Linear-interpolation percentile of an unsorted sample, `q` in [0, 1].
pub fn percentile(values: &[f64], q: f64) -> f64 {
    assert!(!values.is_empty() && (0.0..=1.0).contains(&q));
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
}

fn format_summary_csv(
    rows: &[BenchRow],
    ks: &[usize],
    config: &BenchConfig,
    rho: Option<f64>,
    rank_a: usize,
) -> String {
    let coordinate = matches!(config.method, Method::Kaczmarz | Method::CoordinateAscent);
    let mut out =
        String::from("k,median_rel_error,p90_rel_error,mean_rel_error,theory_rho_k,lower_bound_k\n");
    for &k in ks {
        let at_k: Vec<f64> = rows
            .iter()
            .filter(|r| r.k == k)
            .map(|r| r.rel_error)
            .collect();
        let median = percentile(&at_k, 0.5);
        let p90 = percentile(&at_k, 0.9);
        let mean = at_k.iter().sum::<f64>() / at_k.len() as f64;
        let theory = rho.map_or(String::new(), |r| format!("{}", r.powi(k as i32)));
        // The expected-rank lower bound specialized to single-row sketches.
        let bound = if coordinate {
            format!("{}", (1.0 - 1.0 / rank_a as f64).powi(k as i32))
        } else {
            String::new()
        };
        out.push_str(&format!("{k},{median},{p90},{mean},{theory},{bound}\n"));
    }
    out
}
