//! Command-line front end: problem generation, single solves, benchmark
//! sweeps, rate analysis and gossip simulation.
//!
//! Exit codes: 0 on success, 1 on usage or I/O errors, 2 on numerical or
//! consistency failures.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;

use crate::bench::{self, BenchConfig, Method, ProbabilityRule};
use crate::error::Error;
use crate::gossip::{self, GossipModel, GossipNetwork};
use crate::io;
use crate::rates;
use crate::solver::{self, SolveOptions, Start};

#[derive(Parser)]
#[command(
    name = "sda",
    about = "Randomized projection solvers for consistent linear systems",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a rank-deficient random matrix and write it as Matrix Market.
    Gen(GenArgs),
    /// Solve a single system and write the convergence trace as CSV.
    Solve(SolveArgs),
    /// Run repeated randomized trials and write per-trial CSV plus summary.
    Bench(BenchArgs),
    /// Report the convergence rate and related diagnostics for a sketch
    /// distribution on a problem.
    Analyze(AnalyzeArgs),
    /// Simulate randomized gossip averaging on a graph.
    Gossip(GossipArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Matrix dimension (the matrix is n-by-n).
    #[arg(long)]
    n: usize,
    /// Target rank after singular value truncation.
    #[arg(long, short)]
    rank: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path (.mtx).
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
struct ProblemArgs {
    /// Matrix Market file holding A.
    #[arg(long)]
    matrix: PathBuf,
    /// Right-hand side vector file; when absent, b is synthesized as
    /// A x_true for a seeded random x_true so the system is consistent.
    #[arg(long)]
    rhs: Option<PathBuf>,
    /// Anchor vector c (defaults to 0).
    #[arg(long)]
    c_file: Option<PathBuf>,
    /// Metric matrix B as Matrix Market (defaults to the identity).
    #[arg(long)]
    b_matrix_file: Option<PathBuf>,
}

#[derive(Args)]
struct MethodArgs {
    /// One of: kaczmarz, coordinate-ascent, block(T), count-sketch(Q),
    /// count-min(Q), gaussian(Q).
    #[arg(long, default_value = "kaczmarz")]
    method: String,
    /// Row selection rule for coordinate methods: uniform or row-norm.
    #[arg(long, default_value = "uniform")]
    prob_rule: String,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    method: MethodArgs,
    #[arg(long, default_value_t = 10_000)]
    max_iters: usize,
    #[arg(long)]
    tol_residual: Option<f64>,
    #[arg(long)]
    tol_gap: Option<f64>,
    #[arg(long, default_value_t = 100)]
    gap_check_period: usize,
    #[arg(long, default_value_t = 1)]
    record_every: usize,
    /// Start from this primal point instead of the dual zero vector.
    #[arg(long)]
    x0_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV trace output path; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Matrix Market file holding A; mutually exclusive with --n/--rank.
    #[arg(long, conflicts_with_all = ["n", "rank"])]
    matrix: Option<PathBuf>,
    /// Generate an n-by-n matrix instead of loading one.
    #[arg(long, requires = "rank")]
    n: Option<usize>,
    #[arg(long, requires = "n")]
    rank: Option<usize>,
    #[command(flatten)]
    method: MethodArgs,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 1000)]
    iterations: usize,
    #[arg(long, default_value_t = 10)]
    record_every: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-trial CSV output path.
    #[arg(long, short)]
    output: PathBuf,
    /// Summary-curve CSV path; defaults to the output path with a
    /// `.summary.csv` suffix.
    #[arg(long)]
    summary_output: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    method: MethodArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GossipArgs {
    /// Edge-list graph file: header "n m", then m lines "i j" (1-based).
    #[arg(long)]
    graph: PathBuf,
    /// Initial node values, one per line.
    #[arg(long)]
    values: PathBuf,
    /// Constraint model: 1 (pairwise edge) or 2 (neighbourhood mean).
    #[arg(long, default_value_t = 1)]
    model: u8,
    #[arg(long, default_value_t = 1000)]
    rounds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV of the consensus error per round; stdout summary only when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

/// Parses the command line and runs it, returning the process exit code.
pub fn main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version through this path with code 0.
            let _ = e.print();
            return if e.exit_code() == 0 { 0 } else { 1 };
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Numerical and consistency failures exit with 2; everything else
/// (usage, parsing, I/O) with 1.
fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InconsistentSystem { .. }
        | Error::NotPositiveDefinite
        | Error::NotSymmetric
        | Error::ZeroMatrix
        | Error::ZeroRow { .. }
        | Error::AnalysisUnavailable(_) => 2,
        _ => 1,
    }
}

fn parse_method(text: &str) -> crate::Result<Method> {
    let text = text.trim();
    let (name, param) = match text.split_once('(') {
        Some((name, rest)) => {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::InvalidArgument(format!("malformed method {text}")))?;
            let value: usize = inner
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad method parameter {inner}")))?;
            (name.trim(), Some(value))
        }
        None => (text, None),
    };
    let need = |what: &str| {
        param.ok_or_else(|| {
            Error::InvalidArgument(format!("method {name} needs a parameter, e.g. {name}({what})"))
        })
    };
    match name {
        "kaczmarz" => Ok(Method::Kaczmarz),
        "coordinate-ascent" => Ok(Method::CoordinateAscent),
        "block" => Ok(Method::Block { size: need("3")? }),
        "count-sketch" => Ok(Method::CountSketch { cols: need("2")? }),
        "count-min" => Ok(Method::CountMin { cols: need("2")? }),
        "gaussian" => Ok(Method::Gaussian { cols: need("2")? }),
        _ => Err(Error::InvalidArgument(format!("unknown method {name}"))),
    }
}

fn parse_rule(text: &str) -> crate::Result<ProbabilityRule> {
    match text {
        "uniform" => Ok(ProbabilityRule::Uniform),
        "row-norm" => Ok(ProbabilityRule::RowNorm),
        _ => Err(Error::InvalidArgument(format!(
            "unknown probability rule {text} (expected uniform or row-norm)"
        ))),
    }
}

/// Loads A, b, B and c per the flags; b defaults to `A x_true` with a
/// seeded standard-normal `x_true`.
fn load_problem(args: &ProblemArgs, seed: u64) -> crate::Result<solver::ProjectionProblem> {
    let a = io::read_matrix(&args.matrix)?;
    let b = match &args.rhs {
        Some(path) => io::read_vector(path)?,
        None => {
            use rand::prelude::*;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(u64::MAX);
            let x_true = DVector::from_fn(a.ncols(), |_, _| {
                rng.sample::<f64, _>(rand_distr::StandardNormal)
            });
            &a * x_true
        }
    };
    let metric = match &args.b_matrix_file {
        Some(path) => crate::linalg::SpdMatrix::new(io::read_matrix(path)?)?,
        None => crate::linalg::SpdMatrix::identity(a.ncols()),
    };
    let c = match &args.c_file {
        Some(path) => io::read_vector(path)?,
        None => DVector::zeros(a.ncols()),
    };
    solver::ProjectionProblem::new(a, b, metric, c)
}

fn write_or_print(path: &Option<PathBuf>, content: &str) -> crate::Result<()> {
    match path {
        Some(path) => {
            std::fs::write(path, content)?;
            Ok(())
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn run(command: Command) -> crate::Result<()> {
    match command {
        Command::Gen(args) => {
            let mat = bench::generate_rank_deficient(args.n, args.rank, args.seed)?;
            io::write_matrix(&args.output, &mat)?;
            println!(
                "wrote {}x{} matrix of rank {} to {}",
                args.n,
                args.n,
                args.rank,
                args.output.display()
            );
            Ok(())
        }
        Command::Solve(args) => run_solve(args),
        Command::Bench(args) => run_bench(args),
        Command::Analyze(args) => run_analyze(args),
        Command::Gossip(args) => run_gossip_cmd(args),
    }
}

fn run_solve(args: SolveArgs) -> crate::Result<()> {
    let problem = load_problem(&args.problem, args.seed)?;
    let method = parse_method(&args.method.method)?;
    let rule = parse_rule(&args.method.prob_rule)?;
    let spec = bench::sampler_spec(method, rule, problem.a())?;

    let mut options = SolveOptions::new(args.seed);
    options.max_iters = args.max_iters;
    options.tol_residual = args.tol_residual;
    options.tol_gap = args.tol_gap;
    options.gap_check_period = args.gap_check_period;
    options.record_every = args.record_every;

    let start = match &args.x0_file {
        Some(path) => Start::Primal(io::read_vector(path)?),
        None => Start::Dual(DVector::zeros(problem.num_rows())),
    };
    let report = solver::solve(&problem, &spec, &options, start)?;

    let mut csv = String::from("trial,k,rel_error,residual,dual_value,gap\n");
    let denom = report.trace.first().map_or(1.0, |r| r.error_sq.max(1e-300));
    for row in &report.trace {
        let dual = row.dual_value.map_or(String::new(), |v| v.to_string());
        let gap = row.gap.map_or(String::new(), |v| v.to_string());
        csv.push_str(&format!(
            "0,{},{},{},{},{}\n",
            row.k,
            row.error_sq / denom,
            row.residual,
            dual,
            gap
        ));
    }
    write_or_print(&args.output, &csv)?;
    eprintln!(
        "{} after {} iterations (final residual {:e})",
        if report.converged {
            "converged"
        } else {
            "stopped"
        },
        report.iterations,
        report.trace.last().map_or(f64::NAN, |r| r.residual)
    );
    if report.h_singular == Some(true) {
        eprintln!("warning: H is singular for this sketch distribution; convergence is not guaranteed");
    }
    Ok(())
}

fn run_bench(args: BenchArgs) -> crate::Result<()> {
    let a = match (&args.matrix, args.n, args.rank) {
        (Some(path), _, _) => io::read_matrix(path)?,
        (None, Some(n), Some(r)) => bench::generate_rank_deficient(n, r, args.seed)?,
        _ => {
            return Err(Error::InvalidArgument(
                "provide either --matrix or both --n and --rank".into(),
            ))
        }
    };
    let config = BenchConfig {
        method: parse_method(&args.method.method)?,
        rule: parse_rule(&args.method.prob_rule)?,
        trials: args.trials,
        iterations: args.iterations,
        record_every: args.record_every,
        base_seed: args.seed,
    };
    let out = bench::run_benchmark(a, &config)?;
    std::fs::write(&args.output, &out.csv)?;
    let summary_path = args.summary_output.unwrap_or_else(|| {
        let mut p = args.output.clone();
        p.set_extension("summary.csv");
        p
    });
    std::fs::write(&summary_path, &out.summary_csv)?;
    match out.rho {
        Some(rho) => println!("rank(A) = {}, rho = {}", out.rank_a, rho),
        None => println!(
            "rank(A) = {}, rho unavailable for this sketch distribution",
            out.rank_a
        ),
    }
    Ok(())
}

fn run_analyze(args: AnalyzeArgs) -> crate::Result<()> {
    let problem = load_problem(&args.problem, args.seed)?;
    let method = parse_method(&args.method.method)?;
    let rule = parse_rule(&args.method.prob_rule)?;
    let spec = bench::sampler_spec(method, rule, problem.a())?;
    let dist = spec.discrete_support().map_err(|e| match e {
        Error::AnalysisUnavailable(_) => {
            Error::AnalysisUnavailable("analysis unavailable for this sampler")
        }
        other => other,
    })?;
    let report = rates::rate_report(&dist, &problem)?;

    println!(
        "H nonsingular: {}{}",
        report.h_nonsingular,
        if report.h_nonsingular {
            ""
        } else {
            "  (warning: convergence to the exact solution is not guaranteed)"
        }
    );
    println!("rho = {}", report.rho);
    println!("lower bound = {}", report.lower_bound);
    println!("rank(A) = {}", report.rank_a);
    println!("E[rank(S^T A)] = {}", report.expected_sketch_rank);
    for eps in [1e-2f64, 1e-4, 1e-8] {
        let k = if report.rho <= 0.0 {
            1
        } else {
            (eps.ln() / report.rho.ln()).ceil() as u64
        };
        println!("k({eps:e}) = {k}");
    }
    Ok(())
}

fn run_gossip_cmd(args: GossipArgs) -> crate::Result<()> {
    let model = match args.model {
        1 => GossipModel::PairwiseEdge,
        2 => GossipModel::NeighbourhoodMean,
        other => {
            return Err(Error::InvalidArgument(format!(
                "model must be 1 or 2, got {other}"
            )))
        }
    };
    let text = std::fs::read_to_string(&args.graph)?;
    let values = io::read_vector(&args.values)?;
    let g = GossipNetwork::parse_edge_list(&text, values)?;
    let rate = gossip::gossip_rate(&g, model)?;
    let report = gossip::run_gossip(&g, model, args.rounds, args.seed)?;

    let mean = g.mean_value();
    let error = |v: &DVector<f64>| v.iter().map(|x| (x - mean).abs()).fold(0.0, f64::max);
    if let Some(path) = &args.output {
        let mut csv = String::from("round,error\n");
        for (round, v) in report.values_trace.iter().enumerate() {
            csv.push_str(&format!("{round},{}\n", error(v)));
        }
        std::fs::write(path, csv)?;
    }
    println!(
        "nodes = {}, edges = {}, mean = {}, rate = {}",
        g.num_nodes(),
        g.num_edges(),
        mean,
        rate
    );
    println!(
        "after {} rounds: max |x_i - mean| = {:e}",
        report.rounds,
        error(&report.final_values)
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_method_strings() {
        assert_eq!(parse_method("kaczmarz").unwrap(), Method::Kaczmarz);
        assert_eq!(
            parse_method("coordinate-ascent").unwrap(),
            Method::CoordinateAscent
        );
        assert_eq!(parse_method("block(3)").unwrap(), Method::Block { size: 3 });
        assert_eq!(
            parse_method("count-sketch(2)").unwrap(),
            Method::CountSketch { cols: 2 }
        );
        assert_eq!(
            parse_method("count-min(4)").unwrap(),
            Method::CountMin { cols: 4 }
        );
        assert_eq!(
            parse_method("gaussian(5)").unwrap(),
            Method::Gaussian { cols: 5 }
        );
        assert!(parse_method("block").is_err());
        assert!(parse_method("block(x)").is_err());
        assert!(parse_method("block(3").is_err());
        assert!(parse_method("sor").is_err());
    }

    #[test]
    fn parses_probability_rules() {
        assert_eq!(parse_rule("uniform").unwrap(), ProbabilityRule::Uniform);
        assert_eq!(parse_rule("row-norm").unwrap(), ProbabilityRule::RowNorm);
        assert!(parse_rule("zipf").is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(main(["sda", "frobnicate"]), 1);
        assert_eq!(main(["sda"]), 1);
        assert_eq!(main(["sda", "--help"]), 0);
    }

    #[test]
    fn numerical_errors_map_to_exit_two() {
        assert_eq!(
            exit_code(&Error::InconsistentSystem {
                residual: 1.0,
                tolerance: 0.0
            }),
            2
        );
        assert_eq!(exit_code(&Error::ZeroMatrix), 2);
        assert_eq!(exit_code(&Error::Parse("x".into())), 1);
        assert_eq!(
            exit_code(&Error::Io(std::io::Error::other("missing"))),
            1
        );
    }
}
