//! Distributed average consensus as a constrained projection problem:
//! graph-to-matrix constructions, the specialized per-edge and per-node
//! averaging updates, sum invariance, and Laplacian-based rate prediction.

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg;
use crate::rates;
use crate::solver::ProjectionProblem;

/// Which linear encoding of the consensus constraint drives the updates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GossipModel {
    /// One equation per edge: `x_i = x_j`. The per-step update replaces the
    /// two endpoint values by their average.
    PairwiseEdge,
    /// One equation per node: `x_i` equals the mean of its neighbours.
    NeighbourhoodMean,
}

/// An undirected connected simple graph with oriented edges, plus the
/// private node values to be averaged.
///
/// Edge orientation is fixed as `(min, max)` of the endpoint indices; the
/// orientation only flips signs of constraint rows, nothing downstream
/// depends on it.
#[derive(Clone, Debug)]
pub struct GossipNetwork {
    n: usize,
    edges: Vec<(usize, usize)>,
    neighbours: Vec<Vec<usize>>,
    values: DVector<f64>,
}

impl GossipNetwork {
    /// Node indices are 0-based. Rejects self-loops, duplicate edges,
    /// out-of-range endpoints and disconnected graphs.
    pub fn new(n: usize, edges: Vec<(usize, usize)>, values: DVector<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph has no nodes".into()));
        }
        if values.len() != n {
            return Err(Error::DimensionMismatch {
                context: "GossipNetwork values",
                expected: n,
                got: values.len(),
            });
        }
        let mut oriented = Vec::with_capacity(edges.len());
        let mut seen = std::collections::HashSet::new();
        let mut neighbours = vec![Vec::new(); n];
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i}, {j}) out of range for {n} nodes"
                )));
            }
            if i == j {
                return Err(Error::InvalidGraph(format!("self-loop at node {i}")));
            }
            let e = (i.min(j), i.max(j));
            if !seen.insert(e) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge ({}, {})",
                    e.0, e.1
                )));
            }
            neighbours[e.0].push(e.1);
            neighbours[e.1].push(e.0);
            oriented.push(e);
        }
        for adj in &mut neighbours {
            adj.sort_unstable();
        }
        let g = Self {
            n,
            edges: oriented,
            neighbours,
            values,
        };
        if !g.is_connected() {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        Ok(g)
    }

    /// Parses the edge-list text format: first line `n m`, then `m` lines
    /// `i j` with 1-based node indices.
    pub fn parse_edge_list(text: &str, values: DVector<f64>) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty edge-list file".into()))?;
        let mut it = header.split_whitespace();
        let n: usize = parse_field(it.next(), "node count")?;
        let m: usize = parse_field(it.next(), "edge count")?;
        let mut edges = Vec::with_capacity(m);
        for line in lines {
            let mut it = line.split_whitespace();
            let i: usize = parse_field(it.next(), "edge endpoint")?;
            let j: usize = parse_field(it.next(), "edge endpoint")?;
            if i == 0 || j == 0 {
                return Err(Error::Parse("edge-list node indices are 1-based".into()));
            }
            edges.push((i - 1, j - 1));
        }
        if edges.len() != m {
            return Err(Error::Parse(format!(
                "edge-list header promises {m} edges, found {}",
                edges.len()
            )));
        }
        Self::new(n, edges, values)
    }

    pub fn complete(n: usize, values: DVector<f64>) -> Result<Self> {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((i, j));
            }
        }
        Self::new(n, edges, values)
    }

    fn is_connected(&self) -> bool {
        if self.n == 1 {
            return true;
        }
        let mut visited = vec![false; self.n];
        let mut queue = std::collections::VecDeque::from([0usize]);
        visited[0] = true;
        let mut count = 1;
        while let Some(i) = queue.pop_front() {
            for &j in &self.neighbours[i] {
                if !visited[j] {
                    visited[j] = true;
                    count += 1;
                    queue.push_back(j);
                }
            }
        }
        count == self.n
    }

    pub fn num_nodes(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbours(&self, i: usize) -> &[usize] {
        &self.neighbours[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbours[i].len()
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn mean_value(&self) -> f64 {
        self.values.sum() / self.n as f64
    }
}

fn parse_field<T: std::str::FromStr>(field: Option<&str>, what: &str) -> Result<T> {
    field
        .ok_or_else(|| Error::Parse(format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::Parse(format!("malformed {what}")))
}

/// Constraint matrix with one row `f_i - f_j` per oriented edge; `b = 0`.
pub fn model1_matrix(g: &GossipNetwork) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(g.num_edges(), g.n);
    for (e, &(i, j)) in g.edges.iter().enumerate() {
        a[(e, i)] = 1.0;
        a[(e, j)] = -1.0;
    }
    a
}

/// Graph Laplacian: degrees on the diagonal, -1 on edges. Equals
/// `A^T A` for the edge-incidence matrix of [`model1_matrix`].
pub fn laplacian(g: &GossipNetwork) -> DMatrix<f64> {
    let mut l = DMatrix::zeros(g.n, g.n);
    for i in 0..g.n {
        l[(i, i)] = g.degree(i) as f64;
    }
    for &(i, j) in &g.edges {
        l[(i, j)] = -1.0;
        l[(j, i)] = -1.0;
    }
    l
}

/// Constraint matrix with one row `f_i - (1/d_i) sum_{j in N(i)} f_j` per
/// node; `b = 0`.
pub fn model2_matrix(g: &GossipNetwork) -> Result<DMatrix<f64>> {
    let mut a = DMatrix::zeros(g.n, g.n);
    for i in 0..g.n {
        let d = g.degree(i);
        if d == 0 {
            return Err(Error::InvalidGraph(format!("isolated node {i}")));
        }
        a[(i, i)] = 1.0;
        for &j in g.neighbours(i) {
            a[(i, j)] = -1.0 / d as f64;
        }
    }
    Ok(a)
}

/// The consensus problem in projection form for the given model:
/// `minimize 0.5 |x - c|^2` subject to the model's constraint rows, with
/// `c` the private node values.
pub fn consensus_problem(g: &GossipNetwork, model: GossipModel) -> Result<ProjectionProblem> {
    let a = match model {
        GossipModel::PairwiseEdge => model1_matrix(g),
        GossipModel::NeighbourhoodMean => model2_matrix(g)?,
    };
    let m = a.nrows();
    ProjectionProblem::new(
        a,
        DVector::zeros(m),
        crate::linalg::SpdMatrix::identity(g.n),
        g.values.clone(),
    )
}

/// Activating an edge replaces both endpoint values by their average.
/// The coordinate sum is preserved.
pub fn gossip_step_model1(values: &DVector<f64>, edge: (usize, usize)) -> DVector<f64> {
    let mut next = values.clone();
    let avg = 0.5 * (values[edge.0] + values[edge.1]);
    next[edge.0] = avg;
    next[edge.1] = avg;
    next
}

/// Activating a node sets it to the average of itself and its neighbours,
/// and nudges each neighbour by the same correction scaled by `1/(d_i+1)`.
/// The coordinate sum is preserved.
pub fn gossip_step_model2(
    values: &DVector<f64>,
    node: usize,
    g: &GossipNetwork,
) -> DVector<f64> {
    let d = g.degree(node) as f64;
    let neighbour_sum: f64 = g.neighbours(node).iter().map(|&j| values[j]).sum();
    let mut next = values.clone();
    next[node] = (values[node] + neighbour_sum) / (d + 1.0);
    let correction = (values[node] - neighbour_sum / d) / (d + 1.0);
    for &j in g.neighbours(node) {
        next[j] = values[j] + correction;
    }
    next
}

/// Expected contraction rate of the consensus error.
///
/// For the pairwise-edge model this is the closed form
/// `1 - lambda_min_plus(L) / (2m)` with `L` the graph Laplacian. The
/// neighbourhood-mean model has no closed form on general graphs and is
/// computed from its constraint matrix (the two agree on complete graphs).
pub fn gossip_rate(g: &GossipNetwork, model: GossipModel) -> Result<f64> {
    match model {
        GossipModel::PairwiseEdge => {
            let lam = linalg::lambda_min_plus(&laplacian(g))?;
            Ok(1.0 - lam / (2.0 * g.num_edges() as f64))
        }
        GossipModel::NeighbourhoodMean => rates::rk_rate(&model2_matrix(g)?),
    }
}

/// Trace of a gossip simulation.
#[derive(Clone, Debug)]
pub struct GossipReport {
    /// Node values after each round, starting with round 0.
    pub values_trace: Vec<DVector<f64>>,
    pub rounds: usize,
    pub final_values: DVector<f64>,
    /// The dual-side correction terms `A^T y`, one per node; at optimality
    /// these converge to `mean(c) - c_i`.
    pub corrections: DVector<f64>,
}

/// Runs uniform random edge (pairwise model) or node (neighbourhood model)
/// activations for the given number of rounds. Deterministic per seed.
pub fn run_gossip(
    g: &GossipNetwork,
    model: GossipModel,
    rounds: usize,
    seed: u64,
) -> Result<GossipReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = g.values.clone();
    let mut values_trace = Vec::with_capacity(rounds + 1);
    values_trace.push(x.clone());
    // The dual iterate: one weight per edge (model 1) or per node (model 2).
    let a = match model {
        GossipModel::PairwiseEdge => model1_matrix(g),
        GossipModel::NeighbourhoodMean => model2_matrix(g)?,
    };
    let mut y = DVector::zeros(a.nrows());
    for _ in 0..rounds {
        match model {
            GossipModel::PairwiseEdge => {
                let e = rng.gen_range(0..g.num_edges());
                let (i, j) = g.edges[e];
                // Least-norm dual coefficient for the selected row.
                y[e] -= 0.5 * (x[i] - x[j]);
                x = gossip_step_model1(&x, (i, j));
            }
            GossipModel::NeighbourhoodMean => {
                let i = rng.gen_range(0..g.n);
                let d = g.degree(i) as f64;
                let neighbour_mean =
                    g.neighbours(i).iter().map(|&j| x[j]).sum::<f64>() / d;
                y[i] -= (x[i] - neighbour_mean) / (1.0 + 1.0 / d);
                x = gossip_step_model2(&x, i, g);
            }
        }
        values_trace.push(x.clone());
    }
    let corrections = a.transpose() * y;
    Ok(GossipReport {
        values_trace,
        rounds,
        final_values: x,
        corrections,
    })
}
