//! The benchmark harness end to end: generate a rank-deficient instance,
//! run repeated Kaczmarz trials, and print the summary curves comparing
//! the observed error against the theoretical rate.

use sda::bench::{generate_rank_deficient, run_benchmark, BenchConfig, Method, ProbabilityRule};

fn main() -> sda::Result<()> {
    let a = generate_rank_deficient(60, 15, 21)?;
    let config = BenchConfig {
        method: Method::Kaczmarz,
        rule: ProbabilityRule::RowNorm,
        trials: 10,
        iterations: 400,
        record_every: 50,
        base_seed: 21,
    };
    let out = run_benchmark(a, &config)?;

    println!(
        "rank(A) = {}, rho = {}\n",
        out.rank_a,
        out.rho.map_or("n/a".into(), |r| format!("{r:.6}"))
    );
    println!("per-trial CSV: {} rows (first 5 shown)", out.rows.len());
    for line in out.csv.lines().take(6) {
        println!("  {line}");
    }
    println!("\nsummary curves:");
    for line in out.summary_csv.lines() {
        println!("  {line}");
    }
    Ok(())
}
