//! Randomized gossip averaging as a projection method: both constraint
//! models, the Laplacian-based rate prediction, and a simulation on a
//! small network.

use nalgebra::dvector;
use sda::gossip::{gossip_rate, run_gossip, GossipModel, GossipNetwork};

fn main() -> sda::Result<()> {
    // A 6-node ring with one chord.
    let g = GossipNetwork::new(
        6,
        vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5), (1, 4)],
        dvector![10.0, 2.0, 8.0, 4.0, 6.0, 0.0],
    )?;
    let mean = g.mean_value();
    println!("initial values = {:?}, mean = {mean}", g.values().as_slice());

    for model in [GossipModel::PairwiseEdge, GossipModel::NeighbourhoodMean] {
        let rho = gossip_rate(&g, model)?;
        let report = run_gossip(&g, model, 200, 42)?;
        let err = |v: &nalgebra::DVector<f64>| {
            v.iter().map(|x| (x - mean).abs()).fold(0.0, f64::max)
        };
        println!("\n{model:?}: predicted per-round rate rho = {rho:.6}");
        for round in [0usize, 25, 50, 100, 200] {
            println!(
                "  round {round:>4}: max |x_i - mean| = {:.3e}",
                err(&report.values_trace[round])
            );
        }
        // The sum of the values is invariant under every gossip update.
        let sums: Vec<f64> = report.values_trace.iter().map(|v| v.sum()).collect();
        let drift = sums
            .iter()
            .map(|s| (s - sums[0]).abs())
            .fold(0.0, f64::max);
        println!("  sum drift over all rounds = {drift:.3e}");
    }
    Ok(())
}
