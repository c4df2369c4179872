//! Dense decompositions shared by the reservoir and readout modules.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, Schur, SVD};

use crate::{Error, Result};

/// Largest eigenvalue magnitude of a square matrix.
pub fn spectral_radius(a: &DMatrix<f64>) -> Result<f64> {
    assert!(a.is_square(), "spectral radius of a non-square matrix");
    if a.nrows() == 0 {
        return Ok(0.0);
    }
    let schur = Schur::try_new(a.clone(), f64::EPSILON, 0).ok_or(Error::NoConvergence("real Schur decomposition"))?;
    Ok(schur.complex_eigenvalues().iter().map(|z| libm::hypot(z.re, z.im)).fold(0.0, f64::max))
}

/// True when the directed graph of nonzero entries has no cycle, i.e. every
/// matrix with this sparsity pattern is nilpotent.
///
/// Floating-point eigenvalue routines report spurious O(eps^(1/k)) radii for
/// nilpotent matrices, so this is checked structurally.
pub fn is_structurally_nilpotent(a: &DMatrix<f64>) -> bool {
    let n = a.nrows();
    // Kahn's algorithm on edges j -> i for A[i, j] != 0.
    let mut indegree = vec![0usize; n];
    for j in 0..n {
        for i in 0..n {
            if a[(i, j)] != 0.0 {
                indegree[i] += 1;
            }
        }
    }
    let mut ready: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut visited = 0;
    while let Some(j) = ready.pop() {
        visited += 1;
        for i in 0..n {
            if a[(i, j)] != 0.0 {
                indegree[i] -= 1;
                if indegree[i] == 0 {
                    ready.push(i);
                }
            }
        }
    }
    visited == n
}

/// Thin QR of a tall (or wide) matrix followed by an SVD of its triangular
/// factor.
///
/// The singular values of `R` are those of the original matrix, so one
/// decomposition serves both the ridge solve and the rank count without ever
/// forming `XᵀX`.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    rows: usize,
    cols: usize,
    qr: nalgebra::linalg::QR<f64, nalgebra::Dyn, nalgebra::Dyn>,
    u: DMatrix<f64>,
    singular_values: Vec<f64>,
    v_t: DMatrix<f64>,
}

impl LeastSquares {
    pub fn new(x: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = x.shape();
        if rows == 0 || cols == 0 {
            return Err(Error::InsufficientData { needed: 1, available: 0 });
        }
        let qr = x.qr();
        let r = qr.r();
        let svd =
            SVD::try_new(r, true, true, f64::EPSILON, 0).ok_or(Error::NoConvergence("singular value decomposition"))?;
        let SVD { u, v_t, singular_values } = svd;
        let u = u.expect("requested U");
        let v_t = v_t.expect("requested V^T");
        Ok(LeastSquares { rows, cols, qr, u, singular_values: singular_values.iter().copied().collect(), v_t })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    /// `max(rows, cols) · eps · σ_max`, the usual numerical-rank threshold.
    pub fn rank_tolerance(&self) -> f64 {
        let smax = self.singular_values.first().copied().unwrap_or(0.0);
        self.rows.max(self.cols) as f64 * f64::EPSILON * smax
    }

    pub fn rank(&self) -> usize {
        let tol = self.rank_tolerance();
        self.singular_values.iter().filter(|&&s| s > tol).count()
    }

    /// Squared Frobenius norm, i.e. `trace(XᵀX)`.
    pub fn gram_trace(&self) -> f64 {
        self.singular_values.iter().map(|s| s * s).sum()
    }

    /// Minimizes `‖X c − g‖² + λ‖c‖²`.
    ///
    /// With `λ = 0` singular values at or below the rank tolerance are
    /// dropped, which yields the minimum-norm least-squares solution.
    pub fn solve(&self, g: &[f64], lambda: f64) -> Result<Vec<f64>> {
        if g.len() != self.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, found: g.len() });
        }
        let mut b = DVector::from_column_slice(g);
        self.qr.q_tr_mul(&mut b);
        let p = self.singular_values.len();
        let tol = self.rank_tolerance();
        let mut y = self.u.tr_mul(&b.rows(0, p));
        for (yi, &s) in y.iter_mut().zip(&self.singular_values) {
            let gain = if lambda > 0.0 {
                s / (s * s + lambda)
            } else if s > tol {
                1.0 / s
            } else {
                0.0
            };
            *yi *= gain;
        }
        Ok(self.v_t.tr_mul(&y).iter().copied().collect())
    }
}
