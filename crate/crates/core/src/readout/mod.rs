//! Linear readouts: state-matrix assembly, ridge fits, normalized errors,
//! covariance rank and memory capacity.

mod memory;
mod rank;

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

pub use memory::{memory_capacity, CapacityFormula, MemoryOptions, MemoryReport};
pub use rank::{covariance_rank, gram_schmidt_basis, GramSchmidt, RankReport};

use crate::linalg::LeastSquares;
use crate::state::ColumnLabel;
use crate::{Error, Result, StateMatrix};

/// Ridge penalty selection.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Ridge {
    /// Use this λ as is.
    Fixed(f64),
    /// `λ = factor · trace(XᵀX) / cols(X)`.
    Relative(f64),
}

impl Default for Ridge {
    fn default() -> Self {
        Ridge::Relative(1e-6)
    }
}

impl Ridge {
    pub fn resolve(&self, decomposition: &LeastSquares) -> Result<f64> {
        let lambda = match *self {
            Ridge::Fixed(l) => l,
            Ridge::Relative(f) => f * decomposition.gram_trace() / decomposition.cols() as f64,
        };
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::param("lambda", "ridge parameter must be finite and non-negative"));
        }
        Ok(lambda)
    }
}

/// Which state matrix a readout was fitted on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FitSource {
    ReservoirOnly,
    Filtered,
}

/// A fitted coefficient vector.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReadoutModel {
    pub coefficients: Vec<f64>,
    pub labels: Vec<ColumnLabel>,
    pub ridge_lambda: f64,
    /// Normalized training error `std(XC − g) / std(g)`.
    pub training_error: f64,
    pub source: FitSource,
    /// Numerical rank of the training matrix fell short of its column count.
    pub rank_deficient: bool,
}

impl ReadoutModel {
    /// `X C` over all rows of `x`.
    pub fn predict(&self, x: &StateMatrix) -> Result<Vec<f64>> {
        if x.ncols() != self.coefficients.len() {
            return Err(Error::DimensionMismatch { expected: self.coefficients.len(), found: x.ncols() });
        }
        Ok(predict(x.data(), &self.coefficients))
    }

    /// Coefficients excluding the trailing bias term, if any.
    pub fn node_coefficients(&self) -> &[f64] {
        match self.labels.last() {
            Some(ColumnLabel::Bias) => &self.coefficients[..self.coefficients.len() - 1],
            _ => &self.coefficients,
        }
    }
}

pub(crate) fn predict(x: &DMatrix<f64>, c: &[f64]) -> Vec<f64> {
    (x * DVector::from_column_slice(c)).iter().copied().collect()
}

/// Appends the all-ones bias column to raw node states.
pub fn assemble_state_matrix(states: &StateMatrix) -> Result<StateMatrix> {
    if states.has_bias() {
        return Err(Error::BiasPresent);
    }
    let (n, k) = (states.nrows(), states.ncols());
    let data = states.data().clone().insert_column(k, 1.0);
    let mut labels = states.labels().to_vec();
    labels.push(ColumnLabel::Bias);
    debug_assert_eq!(data.shape(), (n, k + 1));
    StateMatrix::with_labels(data, labels, states.startup_rows())
}

/// Population standard deviation.
pub(crate) fn std_dev(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    libm::sqrt(v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n)
}

fn normalized_error(fit: &[f64], target: &[f64]) -> Result<f64> {
    let sg = std_dev(target);
    if sg == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let residual: Vec<f64> = fit.iter().zip(target).map(|(h, g)| h - g).collect();
    Ok(std_dev(&residual) / sg)
}

/// The fitting window of `x` and `g` (startup rows removed from both).
fn window<'a>(x: &StateMatrix, g: &'a [f64]) -> Result<(DMatrix<f64>, &'a [f64])> {
    if g.len() != x.nrows() {
        return Err(Error::DimensionMismatch { expected: x.nrows(), found: g.len() });
    }
    if x.fitting_rows() == 0 {
        return Err(Error::InsufficientData { needed: x.startup_rows() + 1, available: x.nrows() });
    }
    Ok((x.fitting_block(), &g[x.startup_rows()..]))
}

/// Ridge regression `argmin ‖XC − g‖² + λ‖C‖²` over the fitting rows of `x`.
///
/// Solved through a QR/SVD factorization; with `λ = 0` and a rank-deficient
/// `x` the minimum-norm solution is returned and `rank_deficient` is set.
pub fn train_ridge(x: &StateMatrix, g: &[f64], ridge: Ridge) -> Result<ReadoutModel> {
    train_ridge_ranked(x, g, ridge).map(|(model, _)| model)
}

/// [`train_ridge`] that also reports the covariance rank of the training
/// matrix from the same factorization.
pub fn train_ridge_ranked(x: &StateMatrix, g: &[f64], ridge: Ridge) -> Result<(ReadoutModel, RankReport)> {
    let (block, target) = window(x, g)?;
    let ls = LeastSquares::new(block.clone())?;
    let lambda = ridge.resolve(&ls)?;
    let coefficients = ls.solve(target, lambda)?;
    let training_error = normalized_error(&predict(&block, &coefficients), target)?;
    let rank = RankReport::from_decomposition(&ls);
    let model = ReadoutModel {
        coefficients,
        labels: x.labels().to_vec(),
        ridge_lambda: lambda,
        training_error,
        source: if x.is_filtered() { FitSource::Filtered } else { FitSource::ReservoirOnly },
        rank_deficient: rank.rank < x.ncols(),
    };
    Ok((model, rank))
}

/// Normalized error `std(XC − g) / std(g)` over the fitting rows of `x`.
pub fn evaluate_error(x: &StateMatrix, model: &ReadoutModel, g: &[f64]) -> Result<f64> {
    if x.ncols() != model.coefficients.len() {
        return Err(Error::DimensionMismatch { expected: model.coefficients.len(), found: x.ncols() });
    }
    let (block, target) = window(x, g)?;
    normalized_error(&predict(&block, &model.coefficients), target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn matrix(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> StateMatrix {
        StateMatrix::from_nodes(DMatrix::from_fn(rows, cols, f)).unwrap()
    }

    #[test]
    fn bias_appended_once() {
        let s = matrix(5, 3, |i, j| (i * 3 + j) as f64);
        let omega = assemble_state_matrix(&s).unwrap();
        assert_eq!(omega.data().shape(), (5, 4));
        assert!(omega.data().column(3).iter().all(|&v| v == 1.0));
        assert_eq!(omega.label_strings(), ["node_1", "node_2", "node_3", "bias"]);
        assert_eq!(assemble_state_matrix(&omega), Err(Error::BiasPresent));
    }

    #[test]
    fn self_fit() {
        let g: Vec<f64> = (0..200).map(|i| libm::sin(i as f64 * 0.37) + 0.1 * i as f64).collect();
        let x = assemble_state_matrix(&matrix(200, 1, |i, _| g[i])).unwrap();
        let model = train_ridge(&x, &g, Ridge::Fixed(1e-8)).unwrap();
        assert!((model.coefficients[0] - 1.0).abs() < 1e-6);
        assert!(model.coefficients[1].abs() < 1e-6);
        assert!(model.training_error < 1e-6);
        assert_eq!(model.source, FitSource::ReservoirOnly);
    }

    #[test]
    fn zero_model_error_is_one() {
        let g: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let x = assemble_state_matrix(&matrix(100, 2, |i, j| (i + j) as f64)).unwrap();
        let model = ReadoutModel {
            coefficients: vec![0.0; 3],
            labels: x.labels().to_vec(),
            ridge_lambda: 0.0,
            training_error: 0.0,
            source: FitSource::ReservoirOnly,
            rank_deficient: false,
        };
        assert!((evaluate_error(&x, &model, &g).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constant_target_is_undefined() {
        let x = assemble_state_matrix(&matrix(10, 1, |i, _| i as f64)).unwrap();
        assert_eq!(train_ridge(&x, &[3.0; 10], Ridge::Fixed(0.1)), Err(Error::ZeroVariance));
    }

    #[test]
    fn rank_deficient_flag() {
        let x = matrix(50, 2, |i, j| (i as f64) * (j + 1) as f64);
        let g: Vec<f64> = (0..50).map(|i| i as f64 * 3.0).collect();
        let model = train_ridge(&x, &g, Ridge::Fixed(0.0)).unwrap();
        assert!(model.rank_deficient);
        // Minimum-norm split of the single direction: c1 + 2 c2 = 3, c ∥ (1, 2).
        assert!((model.coefficients[0] - 0.6).abs() < 1e-10);
        assert!((model.coefficients[1] - 1.2).abs() < 1e-10);
    }

    #[test]
    fn length_mismatch() {
        let x = matrix(10, 1, |i, _| i as f64);
        assert!(matches!(train_ridge(&x, &[1.0; 9], Ridge::default()), Err(Error::DimensionMismatch { .. })));
    }
}
