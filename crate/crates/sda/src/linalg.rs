//! Dense linear-algebra primitives shared by the solver and rate machinery:
//! SPD metric matrices with cached factorizations, SVD-based pseudoinverse
//! and rank decisions, the smallest nonzero eigenvalue, and the projector
//! that splits a vector into its components along `Range(B^-1 A^T)` and
//! `Null(A)`.
//!
//! All rank decisions in the crate go through [`svd_truncation_threshold`]
//! so that ranks and smallest nonzero eigenvalues agree with each other.

use nalgebra::linalg::{Cholesky, SymmetricEigen, SVD};
use nalgebra::{DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::solver::ProjectionProblem;

const SYMMETRY_RTOL: f64 = 1e-12;

/// A symmetric positive definite matrix with a cached Cholesky factorization.
///
/// All applications of the inverse go through the factorization; the inverse
/// itself is never formed.
#[derive(Clone, Debug)]
pub struct SpdMatrix {
    mat: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
}

impl SpdMatrix {
    /// Validates symmetry and positive definiteness and caches the factor.
    pub fn new(mat: DMatrix<f64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch {
                context: "SpdMatrix::new",
                expected: mat.nrows(),
                got: mat.ncols(),
            });
        }
        let scale = mat.amax();
        let mut asym: f64 = 0.0;
        for i in 0..mat.nrows() {
            for j in (i + 1)..mat.ncols() {
                asym = asym.max((mat[(i, j)] - mat[(j, i)]).abs());
            }
        }
        if asym > SYMMETRY_RTOL * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::NotSymmetric);
        }
        let chol = Cholesky::new(mat.clone()).ok_or(Error::NotPositiveDefinite)?;
        Ok(Self { mat, chol })
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(DMatrix::identity(dim, dim)).expect("identity is SPD")
    }

    pub fn from_diagonal(diag: &DVector<f64>) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(diag))
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    /// `B v`
    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.mat * v
    }

    /// `B^-1 v` through the cached factorization.
    pub fn solve(&self, v: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(v)
    }

    /// `B^-1 M` through the cached factorization.
    pub fn solve_matrix(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        self.chol.solve(m)
    }

    /// B-inner product `x^T B y`.
    pub fn inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x.dot(&(&self.mat * y))
    }

    /// `sqrt(x^T B x)`; zero iff `x = 0`.
    pub fn norm(&self, x: &DVector<f64>) -> f64 {
        self.inner(x, x).max(0.0).sqrt()
    }

    /// `x^T B^-1 x`.
    pub fn inv_quadratic(&self, x: &DVector<f64>) -> f64 {
        x.dot(&self.solve(x)).max(0.0)
    }

    /// `B^-1/2` via the symmetric eigendecomposition. Diagnostic path only
    /// (used inside rate computation); solves always go through Cholesky.
    pub fn inv_sqrt(&self) -> DMatrix<f64> {
        let eig = SymmetricEigen::new(self.mat.clone());
        let mut d = eig.eigenvalues.clone();
        for v in d.iter_mut() {
            *v = 1.0 / v.max(f64::MIN_POSITIVE).sqrt();
        }
        &eig.eigenvectors * DMatrix::from_diagonal(&d) * eig.eigenvectors.transpose()
    }
}

/// B-norm of a vector, `sqrt(x^T B x)`.
pub fn b_norm(x: &DVector<f64>, b: &SpdMatrix) -> f64 {
    b.norm(x)
}

/// Rank-truncation threshold `max(m, n) * eps * sigma_max`.
///
/// The same rule drives the pseudoinverse, rank decisions and
/// [`lambda_min_plus`] so that they agree.
pub fn svd_truncation_threshold(nrows: usize, ncols: usize, sigma_max: f64) -> f64 {
    nrows.max(ncols) as f64 * f64::EPSILON * sigma_max
}

/// Thin singular value decomposition `M = U diag(sigma) V^T` with
/// `min(m, n)` columns in `U` and `V` and `sigma` sorted descending.
///
/// The Golub-Kahan implementation in the linear-algebra backend silently
/// returns inconsistent factors on some exactly rank-deficient inputs (the
/// reconstruction error is of order `|M|` rather than roundoff). Since
/// rank-deficient systems are this crate's main subject, every
/// factorization is verified against the input and recomputed with a
/// one-sided Jacobi iteration when the check fails. Jacobi is slower but
/// unconditionally accurate.
#[derive(Clone, Debug)]
pub struct ThinSvd {
    pub u: DMatrix<f64>,
    pub sigma: DVector<f64>,
    pub v: DMatrix<f64>,
}

impl ThinSvd {
    pub fn new(m: &DMatrix<f64>) -> Self {
        let fast = SVD::new(m.clone(), true, true);
        if let (Some(u), Some(vt)) = (fast.u, fast.v_t) {
            let candidate = Self {
                u,
                sigma: fast.singular_values,
                v: vt.transpose(),
            };
            if candidate.reconstructs(m) {
                return candidate;
            }
        }
        jacobi_svd(m)
    }

    fn reconstructs(&self, m: &DMatrix<f64>) -> bool {
        let recon = &self.u * DMatrix::from_diagonal(&self.sigma) * self.v.transpose();
        let scale = self.sigma.max().max(f64::MIN_POSITIVE);
        (m - recon).norm() <= 1e-12 * m.nrows().max(m.ncols()) as f64 * scale
    }

    /// The shared truncation threshold for this factorization.
    pub fn threshold(&self, nrows: usize, ncols: usize) -> f64 {
        svd_truncation_threshold(nrows, ncols, self.sigma.max())
    }
}

/// One-sided Jacobi SVD: rotates column pairs of a working copy until all
/// columns are mutually orthogonal. High relative accuracy; in particular,
/// exact zero singular values come out at roundoff level.
fn jacobi_svd(m: &DMatrix<f64>) -> ThinSvd {
    // Work on the tall orientation so columns outnumber nothing.
    let transposed = m.nrows() < m.ncols();
    let mut w = if transposed { m.transpose() } else { m.clone() };
    let n = w.ncols();
    let mut v = DMatrix::identity(n, n);

    let tol = f64::EPSILON;
    for _sweep in 0..64 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dot(&w.column(q));
                if gamma.abs() <= tol * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                // Classical Jacobi rotation annihilating the (p, q) entry
                // of the Gram matrix.
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..w.nrows() {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)];
                    w[(i, p)] = c * wp - s * wq;
                    w[(i, q)] = s * wp + c * wq;
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = c * vp - s * vq;
                    v[(i, q)] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let mut u = DMatrix::zeros(w.nrows(), n);
    let mut sigma = DVector::zeros(n);
    let mut vv = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        sigma[dst] = norms[src];
        if norms[src] > 0.0 {
            u.set_column(dst, &(w.column(src) / norms[src]));
        }
        vv.set_column(dst, &v.column(src));
    }

    if transposed {
        ThinSvd { u: vv, sigma, v: u }
    } else {
        ThinSvd { u, sigma, v: vv }
    }
}

/// Numerical rank under the shared truncation threshold.
pub fn rank(m: &DMatrix<f64>) -> usize {
    let svd = ThinSvd::new(m);
    let tol = svd.threshold(m.nrows(), m.ncols());
    svd.sigma.iter().filter(|&&s| s > tol).count()
}

/// Moore-Penrose pseudoinverse with the shared truncation threshold.
pub fn pseudoinverse(m: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = ThinSvd::new(m);
    let tol = svd.threshold(m.nrows(), m.ncols());
    let mut sinv = svd.sigma.clone();
    for s in sinv.iter_mut() {
        *s = if *s > tol { 1.0 / *s } else { 0.0 };
    }
    &svd.v * DMatrix::from_diagonal(&sinv) * svd.u.transpose()
}

/// Least-norm solution `M^+ d` of the least-squares problem `min |M x - d|`.
///
/// If `M x = d` is consistent the returned vector satisfies it; among all
/// minimizers it is the unique one lying in `Range(M)` (for symmetric `M`).
pub fn least_norm_solve(m: &DMatrix<f64>, d: &DVector<f64>) -> Result<DVector<f64>> {
    if m.nrows() != d.len() {
        return Err(Error::DimensionMismatch {
            context: "least_norm_solve",
            expected: m.nrows(),
            got: d.len(),
        });
    }
    let svd = ThinSvd::new(m);
    let tol = svd.threshold(m.nrows(), m.ncols());
    let mut coeffs = svd.u.transpose() * d;
    for (i, c) in coeffs.iter_mut().enumerate() {
        let s = svd.sigma[i];
        *c = if s > tol { *c / s } else { 0.0 };
    }
    Ok(&svd.v * coeffs)
}

/// Smallest eigenvalue of a symmetric PSD matrix strictly above the shared
/// truncation threshold.
pub fn lambda_min_plus(m: &DMatrix<f64>) -> Result<f64> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            context: "lambda_min_plus",
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    // Symmetrize to protect the eigensolver from roundoff in the input.
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let lmax = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    let tol = svd_truncation_threshold(m.nrows(), m.ncols(), lmax);
    eig.eigenvalues
        .iter()
        .cloned()
        .filter(|&l| l > tol)
        .fold(None, |acc: Option<f64>, l| {
            Some(acc.map_or(l, |a| a.min(l)))
        })
        .ok_or(Error::ZeroMatrix)
}

/// The matrix `Z_A = A^T (A B^-1 A^T)^+ A`.
///
/// `B^-1 Z_A` is a projector in the B-norm onto `Range(B^-1 A^T)`, and
/// `I - B^-1 Z_A` projects onto `Null(A)`; `Tr(B^-1 Z_A) = rank(A)`.
#[derive(Clone, Debug)]
pub struct BProjector {
    z: DMatrix<f64>,
}

impl BProjector {
    pub fn z(&self) -> &DMatrix<f64> {
        &self.z
    }

    /// `Z_A x`
    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.z * x
    }
}

/// Builds `Z_A` for the given problem.
pub fn projector(problem: &ProjectionProblem) -> BProjector {
    let a = problem.a();
    let core = pseudoinverse(problem.a_binv_at());
    BProjector {
        z: a.transpose() * core * a,
    }
}

/// The unique split `x = s + t` with `s` in `Range(B^-1 A^T)` and `t` in
/// `Null(A)`; the two parts are B-orthogonal, so the Pythagorean identity
/// `|x|_B^2 = |s|_B^2 + |t|_B^2` holds.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub s: DVector<f64>,
    pub t: DVector<f64>,
}

/// Computes the B-orthogonal decomposition of `x` via `s = B^-1 Z_A x`.
pub fn decompose(x: &DVector<f64>, problem: &ProjectionProblem) -> Decomposition {
    let z = projector(problem);
    let s = problem.metric().solve(&z.apply(x));
    let t = x - &s;
    Decomposition { s, t }
}
