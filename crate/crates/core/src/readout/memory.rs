use alloc::vec::Vec;

use super::{assemble_state_matrix, predict, Ridge};
use crate::linalg::LeastSquares;
use crate::signals::uniform_noise;
use crate::{Error, Result, StateMatrix};

/// Per-delay capacity definition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CapacityFormula {
    /// Squared Pearson correlation between `s(n − k)` and its reconstruction.
    #[default]
    SquaredCorrelation,
    /// Covariance divided by the product of the summed deviations, exactly
    /// as sometimes printed. Neither bounded nor dimensionless; kept only for
    /// comparison.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MemoryOptions {
    /// Length of the noise drive.
    pub samples: usize,
    pub k_max: usize,
    pub ridge: Ridge,
    /// Leading share of usable rows used for fitting; the rest is held out.
    pub train_fraction: f64,
    pub formula: CapacityFormula,
}

impl Default for MemoryOptions {
    fn default() -> Self {
        MemoryOptions {
            samples: 11_000,
            k_max: 50,
            ridge: Ridge::default(),
            train_fraction: 0.8,
            formula: CapacityFormula::SquaredCorrelation,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MemoryReport {
    /// `MC_k` for `k = 1..=k_max` (element 0 is `k = 1`).
    pub per_delay: Vec<f64>,
    pub total: f64,
}

fn centered(v: &[f64]) -> Vec<f64> {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| x - mean).collect()
}

fn capacity(formula: CapacityFormula, target: &[f64], fit: &[f64]) -> f64 {
    let (t, f) = (centered(target), centered(fit));
    let cov: f64 = t.iter().zip(&f).map(|(a, b)| a * b).sum();
    match formula {
        CapacityFormula::SquaredCorrelation => {
            let vt: f64 = t.iter().map(|a| a * a).sum();
            let vf: f64 = f.iter().map(|a| a * a).sum();
            if vt == 0.0 || vf == 0.0 {
                0.0
            } else {
                (cov * cov / (vt * vf)).clamp(0.0, 1.0)
            }
        }
        CapacityFormula::Literal => {
            let denom = t.iter().sum::<f64>() * f.iter().sum::<f64>();
            if denom == 0.0 {
                0.0
            } else {
                cov / denom
            }
        }
    }
}

/// Memory capacity of a reservoir (optionally followed by filters).
///
/// `runner` receives a U(-1, 1) drive of `options.samples` samples and must
/// return states whose rows line up with the *last* `rows` input samples.
/// For each delay `k` a ridge readout reconstructs `s(n − k)` on the leading
/// `train_fraction` of rows; `MC_k` is measured on the held-out rows.
pub fn memory_capacity<F>(mut runner: F, seed: u64, options: &MemoryOptions) -> Result<MemoryReport>
where
    F: FnMut(&[f64]) -> Result<StateMatrix>,
{
    if options.k_max == 0 {
        return Err(Error::param("k_max", "must be at least 1"));
    }
    if !(options.train_fraction > 0.0 && options.train_fraction < 1.0) {
        return Err(Error::param("train_fraction", "must lie in (0, 1)"));
    }
    let drive = uniform_noise(seed, options.samples)?.into_columns().remove(0);
    let states = runner(&drive)?;
    let states = if states.has_bias() { states } else { assemble_state_matrix(&states)? };
    if states.nrows() > drive.len() {
        return Err(Error::DimensionMismatch { expected: drive.len(), found: states.nrows() });
    }
    let offset = drive.len() - states.nrows();
    // Every delay must look back to a real input sample.
    let first = states.startup_rows().max(options.k_max.saturating_sub(offset));
    let usable = states.nrows() - first;
    let n_train = libm::floor(usable as f64 * options.train_fraction) as usize;
    let n_test = usable - n_train;
    if n_train <= states.ncols() || n_test < 2 {
        return Err(Error::InsufficientData { needed: first + 2 * states.ncols() + 2, available: states.nrows() });
    }

    let train = states.data().rows(first, n_train).into_owned();
    let test = states.data().rows(first + n_train, n_test).into_owned();
    let ls = LeastSquares::new(train)?;
    let lambda = options.ridge.resolve(&ls)?;

    let mut per_delay = Vec::with_capacity(options.k_max);
    for k in 1..=options.k_max {
        let target = |row: usize| drive[offset + row - k];
        let train_target: Vec<f64> = (first..first + n_train).map(target).collect();
        let test_target: Vec<f64> = (first + n_train..first + usable).map(target).collect();
        let c = ls.solve(&train_target, lambda)?;
        let fit = predict(&test, &c);
        per_delay.push(capacity(options.formula, &test_target, &fit));
    }
    let total = per_delay.iter().sum();
    Ok(MemoryReport { per_delay, total })
}
