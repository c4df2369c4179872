use alloc::vec::Vec;

use crate::linalg::LeastSquares;
use crate::{Error, Result, StateMatrix};

/// Numerical rank of a state matrix together with its spectrum.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RankReport {
    pub rank: usize,
    /// Descending.
    pub singular_values: Vec<f64>,
    pub tolerance: f64,
}

impl RankReport {
    pub(crate) fn from_decomposition(ls: &LeastSquares) -> Self {
        RankReport { rank: ls.rank(), singular_values: ls.singular_values().to_vec(), tolerance: ls.rank_tolerance() }
    }
}

/// Rank of `XᵀX`, counted from the singular values of `X` itself above
/// `max(rows, cols) · eps · σ_max`. Startup rows are excluded.
pub fn covariance_rank(x: &StateMatrix) -> Result<RankReport> {
    if x.fitting_rows() == 0 || x.ncols() == 0 {
        return Err(Error::InsufficientData { needed: 1, available: 0 });
    }
    let ls = LeastSquares::new(x.fitting_block())?;
    Ok(RankReport::from_decomposition(&ls))
}

/// Orthonormal basis spanned by a signal and a function of it.
#[derive(Debug, Clone, PartialEq)]
pub struct GramSchmidt {
    pub u1: Vec<f64>,
    /// `None` when `f(x)` is numerically a multiple of `x`.
    pub u2: Option<Vec<f64>>,
    pub rank: usize,
}

/// Relative residual below which `f(x)` counts as collinear with `x`.
pub const COLLINEAR_TOLERANCE: f64 = 1e-10;

fn norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|a| a * a).sum())
}

/// Two-vector Gram–Schmidt: `u1 = x/‖x‖`, `y = f/‖f‖`, `z = y − ⟨u1, y⟩u1`,
/// `u2 = z/‖z‖`.
pub fn gram_schmidt_basis(x: &[f64], fx: &[f64]) -> Result<GramSchmidt> {
    if x.len() != fx.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), found: fx.len() });
    }
    let nx = norm(x);
    if nx == 0.0 || !nx.is_finite() {
        return Err(Error::param("x", "signal must have nonzero finite norm"));
    }
    let u1: Vec<f64> = x.iter().map(|v| v / nx).collect();
    let nf = norm(fx);
    if nf == 0.0 {
        return Ok(GramSchmidt { u1, u2: None, rank: 1 });
    }
    let y: Vec<f64> = fx.iter().map(|v| v / nf).collect();
    let proj: f64 = u1.iter().zip(&y).map(|(a, b)| a * b).sum();
    let z: Vec<f64> = y.iter().zip(&u1).map(|(yi, ui)| yi - proj * ui).collect();
    let nz = norm(&z);
    if nz < COLLINEAR_TOLERANCE {
        return Ok(GramSchmidt { u1, u2: None, rank: 1 });
    }
    // A second pass restores orthogonality lost to cancellation.
    let proj2: f64 = u1.iter().zip(&z).map(|(a, b)| a * b).sum();
    let z: Vec<f64> = z.iter().zip(&u1).map(|(zi, ui)| zi - proj2 * ui).collect();
    let nz = norm(&z);
    Ok(GramSchmidt { u1, u2: Some(z.iter().map(|v| v / nz).collect()), rank: 2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use nalgebra::DMatrix;

    #[test]
    fn multiple_is_rank_one() {
        let x: Vec<f64> = (1..50).map(|i| libm::sin(i as f64)).collect();
        let fx: Vec<f64> = x.iter().map(|v| 3.0 * v).collect();
        let gs = gram_schmidt_basis(&x, &fx).unwrap();
        assert_eq!(gs.rank, 1);
        assert!(gs.u2.is_none());
    }

    #[test]
    fn polynomial_pair_is_orthonormal() {
        let t: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        let t2: Vec<f64> = t.iter().map(|v| v * v).collect();
        let gs = gram_schmidt_basis(&t, &t2).unwrap();
        assert_eq!(gs.rank, 2);
        let u2 = gs.u2.unwrap();
        let dot: f64 = gs.u1.iter().zip(&u2).map(|(a, b)| a * b).sum();
        assert!(dot.abs() < 1e-12);
        assert!((norm(&gs.u1) - 1.0).abs() < 1e-12);
        assert!((norm(&u2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_signal_rejected() {
        assert!(gram_schmidt_basis(&[0.0; 4], &[1.0; 4]).is_err());
    }

    #[test]
    fn duplicated_column_plus_constant() {
        let v: Vec<f64> = (0..200).map(|i| libm::cos(i as f64 * 1.3) * 2.0 + 0.3).collect();
        let m = DMatrix::from_fn(200, 3, |i, j| match j {
            0 => v[i],
            1 => 2.0 * v[i],
            _ => 1.0,
        });
        let labels = vec![crate::ColumnLabel::Node(1), crate::ColumnLabel::Node(2), crate::ColumnLabel::Bias];
        let x = StateMatrix::with_labels(m, labels, 0).unwrap();
        assert_eq!(covariance_rank(&x).unwrap().rank, 2);
    }
}
