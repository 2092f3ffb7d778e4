//! Sketch-distribution samplers and exact analysis of finite discrete
//! distributions: the expected-projector matrix
//! `H = E[S (S^T A B^-1 A^T S)^+ S^T]` and its nonsingularity test.

use nalgebra::DMatrix;
use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg;
use crate::solver::ProjectionProblem;

const PROBABILITY_SUM_TOL: f64 = 1e-12;

/// One draw of the sketching matrix: `m` rows, any (possibly random per
/// draw) number of columns.
#[derive(Clone, Debug, PartialEq)]
pub struct SketchMatrix(DMatrix<f64>);

impl SketchMatrix {
    pub fn new(entries: DMatrix<f64>) -> Self {
        Self(entries)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn num_rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn num_cols(&self) -> usize {
        self.0.ncols()
    }
}

/// A finite discrete distribution over sketching matrices: `S = S_i` with
/// probability `p_i > 0`.
#[derive(Clone, Debug)]
pub struct DiscreteDistribution {
    support: Vec<(DMatrix<f64>, f64)>,
}

impl DiscreteDistribution {
    pub fn new(support: Vec<(DMatrix<f64>, f64)>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        let rows = support[0].0.nrows();
        let mut total = 0.0;
        for (s, p) in &support {
            if s.nrows() != rows {
                return Err(Error::InvalidDistribution(
                    "support matrices must share the row count".into(),
                ));
            }
            if *p <= 0.0 {
                return Err(Error::InvalidDistribution(
                    "probabilities must be positive".into(),
                ));
            }
            total += p;
        }
        if (total - 1.0).abs() > PROBABILITY_SUM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self { support })
    }

    pub fn support(&self) -> &[(DMatrix<f64>, f64)] {
        &self.support
    }

    pub fn num_rows(&self) -> usize {
        self.support[0].0.nrows()
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }
}

/// The distribution parameter of the method: which random sketches to draw.
#[derive(Clone, Debug)]
pub enum SamplerSpec {
    /// A single unit coordinate column `e_i`, drawn with probability `p_i`.
    Coordinate { probs: Vec<f64> },
    /// A column submatrix `I_C` of the identity for an explicitly listed
    /// family of index subsets.
    Block {
        rows: usize,
        subsets: Vec<Vec<usize>>,
        probs: Vec<f64>,
    },
    /// `I_C` for `C` drawn uniformly over all subsets of a fixed size; the
    /// family is sampled directly, never enumerated, so exact H analysis is
    /// not offered for this variant.
    UniformBlocks { rows: usize, size: usize },
    /// `q` columns drawn uniformly with replacement from `[I, -I]`.
    CountSketch { rows: usize, cols: usize },
    /// `q` columns drawn uniformly with replacement from `I`.
    CountMin { rows: usize, cols: usize },
    /// Dense `m x q` with i.i.d. standard normal entries.
    Gaussian { rows: usize, cols: usize },
}

impl SamplerSpec {
    pub fn coordinate(probs: Vec<f64>) -> Self {
        Self::Coordinate { probs }
    }

    pub fn coordinate_uniform(rows: usize) -> Self {
        Self::Coordinate {
            probs: vec![1.0 / rows as f64; rows],
        }
    }

    /// Row-norm probabilities `p_i = |A_i:|^2 / |A|_F^2`.
    pub fn coordinate_row_norm(a: &DMatrix<f64>) -> Result<Self> {
        let fro2 = a.iter().map(|v| v * v).sum::<f64>();
        let probs = (0..a.nrows())
            .map(|i| {
                let r2 = a.row(i).iter().map(|v| v * v).sum::<f64>();
                if r2 == 0.0 {
                    Err(Error::ZeroRow { row: i })
                } else {
                    Ok(r2 / fro2)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::Coordinate { probs })
    }

    pub fn blocks(rows: usize, subsets: Vec<Vec<usize>>, probs: Vec<f64>) -> Self {
        Self::Block {
            rows,
            subsets,
            probs,
        }
    }

    pub fn num_rows(&self) -> usize {
        match self {
            Self::Coordinate { probs } => probs.len(),
            Self::Block { rows, .. }
            | Self::UniformBlocks { rows, .. }
            | Self::CountSketch { rows, .. }
            | Self::CountMin { rows, .. }
            | Self::Gaussian { rows, .. } => *rows,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Coordinate { probs } => {
                validate_probs(probs)?;
            }
            Self::Block {
                rows,
                subsets,
                probs,
            } => {
                validate_probs(probs)?;
                if subsets.len() != probs.len() {
                    return Err(Error::InvalidDistribution(
                        "one probability per subset required".into(),
                    ));
                }
                // Properness: every row index appears in a subset that has
                // positive probability.
                let mut covered = vec![false; *rows];
                for (set, p) in subsets.iter().zip(probs) {
                    if set.is_empty() {
                        return Err(Error::InvalidDistribution("empty block subset".into()));
                    }
                    for &i in set {
                        if i >= *rows {
                            return Err(Error::InvalidDistribution(format!(
                                "block index {i} out of range for {rows} rows"
                            )));
                        }
                        if *p > 0.0 {
                            covered[i] = true;
                        }
                    }
                }
                if covered.iter().any(|c| !c) {
                    return Err(Error::InvalidDistribution(
                        "block family is not proper: some row is never sampled".into(),
                    ));
                }
            }
            Self::UniformBlocks { rows, size } => {
                if *size == 0 || *size > *rows {
                    return Err(Error::InvalidDistribution(format!(
                        "block size {size} out of range for {rows} rows"
                    )));
                }
            }
            Self::CountSketch { cols, .. }
            | Self::CountMin { cols, .. }
            | Self::Gaussian { cols, .. } => {
                if *cols == 0 {
                    return Err(Error::InvalidDistribution(
                        "sketch must have at least one column".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// The explicit finite support, for the variants where it is listed.
    ///
    /// Gaussian, count-sketch/count-min and size-sampled block families are
    /// rejected: exact H analysis is only offered for explicitly listed
    /// finite supports.
    pub fn discrete_support(&self) -> Result<DiscreteDistribution> {
        self.validate()?;
        match self {
            Self::Coordinate { probs } => {
                let m = probs.len();
                let support = probs
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| p > 0.0)
                    .map(|(i, &p)| {
                        let mut s = DMatrix::zeros(m, 1);
                        s[(i, 0)] = 1.0;
                        (s, p)
                    })
                    .collect();
                DiscreteDistribution::new(support)
            }
            Self::Block {
                rows,
                subsets,
                probs,
            } => {
                let support = subsets
                    .iter()
                    .zip(probs)
                    .filter(|(_, &p)| p > 0.0)
                    .map(|(set, &p)| (identity_columns(*rows, set), p))
                    .collect();
                DiscreteDistribution::new(support)
            }
            Self::UniformBlocks { .. } => Err(Error::AnalysisUnavailable(
                "size-sampled block family has no explicit support listing",
            )),
            Self::CountSketch { .. } => Err(Error::AnalysisUnavailable(
                "count-sketch support is too large to enumerate",
            )),
            Self::CountMin { .. } => Err(Error::AnalysisUnavailable(
                "count-min support is too large to enumerate",
            )),
            Self::Gaussian { .. } => Err(Error::AnalysisUnavailable(
                "gaussian sketches have continuous support",
            )),
        }
    }
}

fn validate_probs(probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::InvalidDistribution("empty probability vector".into()));
    }
    if probs.iter().any(|&p| p < 0.0) {
        return Err(Error::InvalidDistribution(
            "probabilities must be nonnegative".into(),
        ));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidDistribution(format!(
            "probabilities sum to {total}, not 1"
        )));
    }
    Ok(())
}

fn identity_columns(rows: usize, subset: &[usize]) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(rows, subset.len());
    for (j, &i) in subset.iter().enumerate() {
        s[(i, j)] = 1.0;
    }
    s
}

/// Draws one sketch from the given spec using the supplied random stream.
pub fn sample(spec: &SamplerSpec, rng: &mut impl Rng) -> SketchMatrix {
    match spec {
        SamplerSpec::Coordinate { probs } => {
            let idx = WeightedIndex::new(probs).expect("validated probabilities");
            let i = idx.sample(rng);
            let mut s = DMatrix::zeros(probs.len(), 1);
            s[(i, 0)] = 1.0;
            SketchMatrix(s)
        }
        SamplerSpec::Block { rows, subsets, probs } => {
            let idx = WeightedIndex::new(probs).expect("validated probabilities");
            let j = idx.sample(rng);
            SketchMatrix(identity_columns(*rows, &subsets[j]))
        }
        SamplerSpec::UniformBlocks { rows, size } => {
            let subset = rand::seq::index::sample(rng, *rows, *size).into_vec();
            SketchMatrix(identity_columns(*rows, &subset))
        }
        SamplerSpec::CountSketch { rows, cols } => {
            let mut s = DMatrix::zeros(*rows, *cols);
            for j in 0..*cols {
                // A uniform column of [I, -I].
                let pick = rng.gen_range(0..2 * rows);
                let (i, sign) = (pick % rows, if pick < *rows { 1.0 } else { -1.0 });
                s[(i, j)] = sign;
            }
            SketchMatrix(s)
        }
        SamplerSpec::CountMin { rows, cols } => {
            let mut s = DMatrix::zeros(*rows, *cols);
            for j in 0..*cols {
                let i = rng.gen_range(0..*rows);
                s[(i, j)] = 1.0;
            }
            SketchMatrix(s)
        }
        SamplerSpec::Gaussian { rows, cols } => {
            let normal = rand_distr::StandardNormal;
            SketchMatrix(DMatrix::from_fn(*rows, *cols, |_, _| rng.sample(normal)))
        }
    }
}

/// A sampler owning its seeded random stream. Streams for concurrent work
/// are split from a base seed via the stream index.
#[derive(Clone, Debug)]
pub struct Sampler {
    spec: SamplerSpec,
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(spec: SamplerSpec, seed: u64) -> Self {
        Self {
            spec,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn with_stream(spec: SamplerSpec, seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { spec, rng }
    }

    pub fn spec(&self) -> &SamplerSpec {
        &self.spec
    }

    pub fn sample(&mut self) -> SketchMatrix {
        sample(&self.spec, &mut self.rng)
    }
}

/// Exact `H = sum_i p_i S_i (S_i^T A B^-1 A^T S_i)^+ S_i^T` for a finite
/// discrete distribution. Symmetric PSD by construction; singular inner
/// matrices are handled by the pseudoinverse.
pub fn compute_h(dist: &DiscreteDistribution, problem: &ProjectionProblem) -> DMatrix<f64> {
    let m = problem.num_rows();
    let mut h = DMatrix::zeros(m, m);
    for (s, p) in dist.support() {
        let inner = s.transpose() * problem.a_binv_at() * s;
        h += (s * linalg::pseudoinverse(&inner) * s.transpose()) * *p;
    }
    h
}

/// Nonsingularity test for H: true iff the concatenation
/// `[S_1 S_1^T A, ..., S_r S_r^T A]` has full row rank `m`.
///
/// Returns the verdict together with the diagnostic rank of the
/// concatenated matrix.
pub fn is_h_nonsingular(
    dist: &DiscreteDistribution,
    problem: &ProjectionProblem,
) -> (bool, usize) {
    let m = problem.num_rows();
    let n = problem.num_cols();
    let mut concat = DMatrix::zeros(m, n * dist.len());
    for (i, (s, _)) in dist.support().iter().enumerate() {
        let block = s * s.transpose() * problem.a();
        concat.view_mut((0, i * n), (m, n)).copy_from(&block);
    }
    let rank = linalg::rank(&concat);
    (rank == m, rank)
}
