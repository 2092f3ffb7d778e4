//! Exact convergence-rate diagnostics: the expected contraction factor
//! `rho = 1 - lambda_min_plus(B^-1/2 A^T H A B^-1/2)`, the rank-based lower
//! bound `1 - E[rank(S^T A)] / rank(A)`, and closed-form specializations
//! for row-norm coordinate sampling and the self-dual SPD case.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{self, SpdMatrix};
use crate::sketch::{self, DiscreteDistribution};
use crate::solver::ProjectionProblem;

/// Rate diagnostics for a (problem, distribution) pair.
#[derive(Clone, Debug)]
pub struct RateReport {
    pub rho: f64,
    pub lower_bound: f64,
    pub h: DMatrix<f64>,
    pub expected_sketch_rank: f64,
    pub rank_a: usize,
    /// Verdict of the range test; when false the decay guarantees behind
    /// `rho` do not apply and the value is reported without one.
    pub h_nonsingular: bool,
}

/// `rho = 1 - lambda_min_plus(B^-1/2 A^T H A B^-1/2)`.
///
/// `B^-1/2` is formed by symmetric eigendecomposition; this is a diagnostic
/// path, never part of the iteration.
pub fn rate_rho(problem: &ProjectionProblem, h: &DMatrix<f64>) -> Result<f64> {
    if h.nrows() != problem.num_rows() || h.ncols() != problem.num_rows() {
        return Err(Error::DimensionMismatch {
            context: "rate_rho H",
            expected: problem.num_rows(),
            got: h.nrows(),
        });
    }
    let binv_half = problem.metric().inv_sqrt();
    let core = &binv_half * problem.a().transpose() * h * problem.a() * &binv_half;
    let lam = linalg::lambda_min_plus(&core)?;
    Ok(1.0 - lam)
}

/// Exact `E[rank(S^T A)]` by enumerating the finite support.
pub fn expected_sketch_rank(dist: &DiscreteDistribution, a: &DMatrix<f64>) -> f64 {
    dist.support()
        .iter()
        .map(|(s, p)| p * linalg::rank(&(s.transpose() * a)) as f64)
        .sum()
}

/// Lower bound `1 - E[rank(S^T A)] / rank(A)` on the rate.
pub fn rate_lower_bound(dist: &DiscreteDistribution, a: &DMatrix<f64>) -> Result<f64> {
    let rank_a = linalg::rank(a);
    if rank_a == 0 {
        return Err(Error::ZeroMatrix);
    }
    Ok(1.0 - expected_sketch_rank(dist, a) / rank_a as f64)
}

/// Rate of randomized Kaczmarz with row-norm probabilities:
/// `1 - lambda_min_plus(A^T A) / |A|_F^2`.
pub fn rk_rate(a: &DMatrix<f64>) -> Result<f64> {
    for i in 0..a.nrows() {
        if a.row(i).iter().all(|&v| v == 0.0) {
            return Err(Error::ZeroRow { row: i });
        }
    }
    let fro2: f64 = a.iter().map(|v| v * v).sum();
    let lam = linalg::lambda_min_plus(&(a.transpose() * a))?;
    Ok(1.0 - lam / fro2)
}

/// Rate of the self-dual coordinate method on SPD `A` with `B = A` and
/// probabilities `p_i = A_ii / Tr(A)`: `1 - lambda_min(A) / Tr(A)`.
pub fn selfdual_rate(a: &DMatrix<f64>) -> Result<f64> {
    let spd = SpdMatrix::new(a.clone())?;
    let lam = linalg::lambda_min_plus(spd.matrix())?;
    // SPD input: the smallest eigenvalue is positive, so the truncated and
    // plain minimum eigenvalue coincide.
    Ok(1.0 - lam / a.trace())
}

/// Shift vector `t`: the B-norm projection of `x0 - c` onto `Null(A)`.
/// Primal iterates converge to `x* + t`.
pub fn shift_vector(x0: &DVector<f64>, problem: &ProjectionProblem) -> DVector<f64> {
    linalg::decompose(&(x0 - problem.anchor()), problem).t
}

/// Full rate diagnostics for a finite discrete distribution.
pub fn rate_report(
    dist: &DiscreteDistribution,
    problem: &ProjectionProblem,
) -> Result<RateReport> {
    let h = sketch::compute_h(dist, problem);
    let (h_nonsingular, _) = sketch::is_h_nonsingular(dist, problem);
    let rho = rate_rho(problem, &h)?;
    let rank_a = linalg::rank(problem.a());
    let expected = expected_sketch_rank(dist, problem.a());
    let lower_bound = rate_lower_bound(dist, problem.a())?;
    Ok(RateReport {
        rho,
        lower_bound,
        h,
        expected_sketch_rank: expected,
        rank_a,
        h_nonsingular,
    })
}
