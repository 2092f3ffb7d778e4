//! The dual ascent iteration, its primal (sketch-and-project) counterpart,
//! the primal-dual linkage `x(y) = c + B^-1 A^T y`, objective and gap
//! evaluation, closed-form reference solutions and the outer solve loop.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{self, SpdMatrix};
use crate::sketch::{SamplerSpec, Sampler, SketchMatrix};

/// Relative tolerance for the consistency check on `Ax = b`.
pub const CONSISTENCY_RTOL: f64 = 1e-8;

/// The constrained projection: minimize `0.5 |x - c|_B^2` subject to
/// `Ax = b`, together with its unconstrained concave quadratic dual.
///
/// The products `B^-1 A^T` and `A B^-1 A^T` are cached at construction;
/// they appear in every step, in the reference solution and in the
/// projector machinery.
#[derive(Clone, Debug)]
pub struct ProjectionProblem {
    a: DMatrix<f64>,
    b: DVector<f64>,
    metric: SpdMatrix,
    c: DVector<f64>,
    binv_at: DMatrix<f64>,
    a_binv_at: DMatrix<f64>,
}

impl ProjectionProblem {
    /// Validates dimensions, rejects an all-zero `A`, and checks that the
    /// system is consistent (least-squares residual within tolerance).
    pub fn new(
        a: DMatrix<f64>,
        b: DVector<f64>,
        metric: SpdMatrix,
        c: DVector<f64>,
    ) -> Result<Self> {
        let (m, n) = a.shape();
        if b.len() != m {
            return Err(Error::DimensionMismatch {
                context: "ProjectionProblem rhs",
                expected: m,
                got: b.len(),
            });
        }
        if metric.dim() != n {
            return Err(Error::DimensionMismatch {
                context: "ProjectionProblem metric",
                expected: n,
                got: metric.dim(),
            });
        }
        if c.len() != n {
            return Err(Error::DimensionMismatch {
                context: "ProjectionProblem anchor",
                expected: n,
                got: c.len(),
            });
        }
        if a.amax() == 0.0 {
            return Err(Error::InvalidArgument(
                "system matrix has no nonzero entry".into(),
            ));
        }
        let x_ls = linalg::pseudoinverse(&a) * &b;
        let residual = (&a * x_ls - &b).norm();
        let tolerance = CONSISTENCY_RTOL * (1.0 + b.norm());
        if residual > tolerance {
            return Err(Error::InconsistentSystem {
                residual,
                tolerance,
            });
        }
        let binv_at = metric.solve_matrix(&a.transpose());
        let a_binv_at = &a * &binv_at;
        Ok(Self {
            a,
            b,
            metric,
            c,
            binv_at,
            a_binv_at,
        })
    }

    /// Convenience constructor with `B = I`, `c = 0`.
    pub fn standard(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        let n = a.ncols();
        Self::new(a, b, SpdMatrix::identity(n), DVector::zeros(n))
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn rhs(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn metric(&self) -> &SpdMatrix {
        &self.metric
    }

    pub fn anchor(&self) -> &DVector<f64> {
        &self.c
    }

    /// Number of equations `m`.
    pub fn num_rows(&self) -> usize {
        self.a.nrows()
    }

    /// Number of unknowns `n`.
    pub fn num_cols(&self) -> usize {
        self.a.ncols()
    }

    /// Cached `B^-1 A^T`.
    pub fn binv_at(&self) -> &DMatrix<f64> {
        &self.binv_at
    }

    /// Cached `A B^-1 A^T`.
    pub fn a_binv_at(&self) -> &DMatrix<f64> {
        &self.a_binv_at
    }
}

/// Paired dual iterate `y` and primal iterate `x = c + B^-1 A^T y`.
#[derive(Clone, Debug)]
pub struct SolverState {
    pub y: DVector<f64>,
    pub x: DVector<f64>,
    pub k: usize,
    /// Step coefficients of the most recent update; empty before the
    /// first step.
    pub last_lambda: DVector<f64>,
}

impl SolverState {
    pub fn from_dual(y: DVector<f64>, problem: &ProjectionProblem) -> Self {
        let x = primal_from_dual(&y, problem);
        Self {
            y,
            x,
            k: 0,
            last_lambda: DVector::zeros(0),
        }
    }
}

/// The linear map `x(y) = c + B^-1 A^T y`.
pub fn primal_from_dual(y: &DVector<f64>, problem: &ProjectionProblem) -> DVector<f64> {
    problem.anchor() + problem.binv_at() * y
}

/// Dual objective `D(y) = (b - Ac)^T y - 0.5 |A^T y|_{B^-1}^2`.
pub fn dual_value(y: &DVector<f64>, problem: &ProjectionProblem) -> f64 {
    let ay = problem.a.transpose() * y;
    (problem.rhs() - &problem.a * problem.anchor()).dot(y)
        - 0.5 * problem.metric().inv_quadratic(&ay)
}

/// Primal objective `P(x) = 0.5 |x - c|_B^2`.
pub fn primal_value(x: &DVector<f64>, problem: &ProjectionProblem) -> f64 {
    let d = x - problem.anchor();
    0.5 * problem.metric().inner(&d, &d)
}

/// Duality gap `P(x(y)) - D(y) = -(grad D(y))^T y`.
///
/// Note that `x(y)` may be infeasible, so a zero gap alone does not certify
/// optimality; pair it with a residual test.
pub fn duality_gap(y: &DVector<f64>, problem: &ProjectionProblem) -> f64 {
    let grad = problem.rhs() - &problem.a * problem.anchor() - problem.a_binv_at() * y;
    -grad.dot(y)
}

/// Solves the sketched normal system `M lambda = d` for the step
/// coefficients: scalar division with a zero guard for 1x1 systems,
/// SVD pseudoinverse otherwise.
fn solve_sketched(m: &DMatrix<f64>, d: &DVector<f64>) -> DVector<f64> {
    if m.nrows() == 1 && m.ncols() == 1 {
        let pivot = m[(0, 0)];
        if pivot.abs() > f64::EPSILON * pivot.abs().max(1.0) && pivot != 0.0 {
            DVector::from_element(1, d[0] / pivot)
        } else {
            DVector::zeros(1)
        }
    } else {
        linalg::least_norm_solve(m, d).expect("dimensions checked by caller")
    }
}

/// One dual ascent step: move `y` in the range of `S` by the least-norm
/// coefficient vector maximizing `D`, and refresh the linked primal point.
pub fn dual_step(
    state: &SolverState,
    sketch: &SketchMatrix,
    problem: &ProjectionProblem,
) -> SolverState {
    let s = sketch.matrix();
    let residual = problem.rhs() - &problem.a * &state.x;
    let m = s.transpose() * problem.a_binv_at() * s;
    let rhs = s.transpose() * residual;
    let lambda = solve_sketched(&m, &rhs);
    let y = &state.y + s * &lambda;
    let x = primal_from_dual(&y, problem);
    SolverState {
        y,
        x,
        k: state.k + 1,
        last_lambda: lambda,
    }
}

/// One sketch-and-project step: the B-norm projection of `x` onto the
/// solution set of the sketched system `S^T A z = S^T b`.
pub fn primal_step(
    x: &DVector<f64>,
    sketch: &SketchMatrix,
    problem: &ProjectionProblem,
) -> DVector<f64> {
    let s = sketch.matrix();
    let m = s.transpose() * problem.a_binv_at() * s;
    let rhs = s.transpose() * (&problem.a * x - problem.rhs());
    let lambda = solve_sketched(&m, &rhs);
    x - problem.binv_at() * (s * lambda)
}

/// The dual optimal point of least Euclidean norm, its primal image, the
/// shared optimal value and the initial distance `0.5 |x0 - x*|_B^2`.
#[derive(Clone, Debug)]
pub struct ReferenceSolution {
    pub y_star: DVector<f64>,
    pub x_star: DVector<f64>,
    pub opt: f64,
    pub u0: f64,
}

/// Closed-form optimum: `y* = (A B^-1 A^T)^+ (b - Ac)`, `x* = x(y*)`.
pub fn reference_solution(
    problem: &ProjectionProblem,
    x0: &DVector<f64>,
) -> Result<ReferenceSolution> {
    let rhs = problem.rhs() - &problem.a * problem.anchor();
    let y_star = linalg::least_norm_solve(problem.a_binv_at(), &rhs)?;
    let x_star = primal_from_dual(&y_star, problem);
    let residual = (&problem.a * &x_star - problem.rhs()).norm();
    let tolerance = CONSISTENCY_RTOL * (1.0 + problem.rhs().norm());
    if residual > tolerance {
        return Err(Error::InconsistentSystem {
            residual,
            tolerance,
        });
    }
    let opt = primal_value(&x_star, problem);
    let dual_opt = dual_value(&y_star, problem);
    debug_assert!(
        (opt - dual_opt).abs() <= 1e-10 * (1.0 + opt.abs()),
        "strong duality violated: P = {opt}, D = {dual_opt}"
    );
    let diff = x0 - &x_star;
    let u0 = 0.5 * problem.metric().inner(&diff, &diff);
    Ok(ReferenceSolution {
        y_star,
        x_star,
        opt,
        u0,
    })
}

/// Stopping rules and bookkeeping knobs for [`solve`].
#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub max_iters: usize,
    /// Euclidean norm of `Ax - b`; defaults to `1e-8 |b|` (absolute `1e-12`
    /// when `b = 0`).
    pub tol_residual: Option<f64>,
    /// Defaults to `1e-8 (1 + |OPT|)`.
    pub tol_gap: Option<f64>,
    /// Iterations between duality-gap evaluations; the gap costs more than
    /// a step, so it is only sampled.
    pub gap_check_period: usize,
    /// Iterations between recorded trace rows.
    pub record_every: usize,
    pub seed: u64,
}

impl SolveOptions {
    pub fn new(seed: u64) -> Self {
        Self {
            max_iters: 10_000,
            tol_residual: None,
            tol_gap: None,
            gap_check_period: 100,
            record_every: 1,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.gap_check_period == 0 || self.record_every == 0 {
            return Err(Error::InvalidArgument(
                "gap_check_period and record_every must be >= 1".into(),
            ));
        }
        if self.tol_residual.map_or(false, |t| t <= 0.0)
            || self.tol_gap.map_or(false, |t| t <= 0.0)
        {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Where the iteration starts. A dual start keeps the primal-dual linkage
/// alive (gap certification available); an arbitrary primal start may sit
/// outside `c + Range(B^-1 A^T)` and then converges to the shifted point
/// `x* + t`.
#[derive(Clone, Debug)]
pub enum Start {
    Dual(DVector<f64>),
    Primal(DVector<f64>),
}

/// One recorded iteration of a solve.
#[derive(Clone, Debug)]
pub struct TraceRow {
    pub k: usize,
    /// `|x^k - x* - t|_B^2`
    pub error_sq: f64,
    /// `|A x^k - b|`
    pub residual: f64,
    /// Dual objective; absent for primal-started runs.
    pub dual_value: Option<f64>,
    /// Duality gap, present only at gap-check iterations of dual runs.
    pub gap: Option<f64>,
}

/// Outcome of [`solve`]: metric trace, final state and convergence flag.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub trace: Vec<TraceRow>,
    pub x: DVector<f64>,
    pub y: Option<DVector<f64>>,
    pub converged: bool,
    pub iterations: usize,
    pub reference: ReferenceSolution,
    /// Projection of `x0 - c` onto `Null(A)`; zero for dual starts.
    pub shift: DVector<f64>,
    /// Whether the sketch distribution's H matrix is singular, when the
    /// distribution is finite discrete and the check is available. A
    /// singular H voids the decay guarantees but the iteration still runs.
    pub h_singular: Option<bool>,
}

/// Runs the iteration until the stopping rule fires or `max_iters` is
/// reached. Deterministic given `(inputs, seed)`.
///
/// Dual-started runs stop when the residual and the (periodically sampled)
/// duality gap both pass; the gap alone certifies nothing because `x(y)`
/// may be infeasible. Primal-started runs have no dual iterate and stop on
/// residual plus step stagnation.
pub fn solve(
    problem: &ProjectionProblem,
    spec: &SamplerSpec,
    options: &SolveOptions,
    start: Start,
) -> Result<SolveReport> {
    options.validate()?;
    spec.validate()?;
    if spec.num_rows() != problem.num_rows() {
        return Err(Error::DimensionMismatch {
            context: "solve sampler rows",
            expected: problem.num_rows(),
            got: spec.num_rows(),
        });
    }

    let x0 = match &start {
        Start::Dual(y0) => primal_from_dual(y0, problem),
        Start::Primal(x0) => x0.clone(),
    };
    let reference = reference_solution(problem, &x0)?;
    let shift = match &start {
        Start::Dual(_) => DVector::zeros(problem.num_cols()),
        Start::Primal(x0) => linalg::decompose(&(x0 - problem.anchor()), problem).t,
    };
    let target = &reference.x_star + &shift;

    let b_norm = problem.rhs().norm();
    let tol_residual = options
        .tol_residual
        .unwrap_or(if b_norm > 0.0 { 1e-8 * b_norm } else { 1e-12 });
    let tol_gap = options
        .tol_gap
        .unwrap_or(1e-8 * (1.0 + reference.opt.abs()));

    let h_singular = match spec.discrete_support() {
        Ok(dist) => Some(!crate::sketch::is_h_nonsingular(&dist, problem).0),
        Err(_) => None,
    };

    let mut sampler = Sampler::new(spec.clone(), options.seed);
    let mut trace = Vec::new();
    let record = |trace: &mut Vec<TraceRow>,
                  k: usize,
                  x: &DVector<f64>,
                  dual: Option<f64>,
                  gap: Option<f64>| {
        let e = x - &target;
        trace.push(TraceRow {
            k,
            error_sq: problem.metric().inner(&e, &e),
            residual: (&problem.a * x - problem.rhs()).norm(),
            dual_value: dual,
            gap,
        });
    };

    let mut converged = false;
    let mut iterations = 0;

    match start {
        Start::Dual(y0) => {
            let mut state = SolverState::from_dual(y0, problem);
            record(
                &mut trace,
                0,
                &state.x,
                Some(dual_value(&state.y, problem)),
                None,
            );
            for k in 1..=options.max_iters {
                let s = sampler.sample();
                state = dual_step(&state, &s, problem);
                iterations = k;
                let residual = (&problem.a * &state.x - problem.rhs()).norm();
                let residual_ok = residual <= tol_residual;
                // The gap is sampled periodically, and additionally checked
                // whenever the residual test passes.
                let want_gap = residual_ok || k % options.gap_check_period == 0;
                let gap = want_gap.then(|| duality_gap(&state.y, problem));
                if k % options.record_every == 0 || residual_ok {
                    record(
                        &mut trace,
                        k,
                        &state.x,
                        Some(dual_value(&state.y, problem)),
                        gap,
                    );
                }
                if residual_ok && gap.map_or(false, |g| g.abs() <= tol_gap) {
                    converged = true;
                    break;
                }
            }
            Ok(SolveReport {
                trace,
                x: state.x,
                y: Some(state.y),
                converged,
                iterations,
                reference,
                shift,
                h_singular,
            })
        }
        Start::Primal(x0) => {
            let mut x = x0;
            record(&mut trace, 0, &x, None, None);
            for k in 1..=options.max_iters {
                let s = sampler.sample();
                let next = primal_step(&x, &s, problem);
                let step = problem.metric().norm(&(&next - &x));
                x = next;
                iterations = k;
                let residual = (&problem.a * &x - problem.rhs()).norm();
                let residual_ok = residual <= tol_residual;
                if k % options.record_every == 0 || residual_ok {
                    record(&mut trace, k, &x, None, None);
                }
                if residual_ok && step <= tol_residual {
                    converged = true;
                    break;
                }
            }
            Ok(SolveReport {
                trace,
                x,
                y: None,
                converged,
                iterations,
                reference,
                shift,
                h_singular,
            })
        }
    }
}
