//! Bessel FIR filter banks applied to reservoir node outputs.
//!
//! Filter `η` of a bank has `η` taps; `y(t) = Σ_{k=1..η} a_k x(t − k + 1)`,
//! so the first tap multiplies the current sample and the order-1 filter
//! `[1]` is the identity.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::state::ColumnLabel;
use crate::{Error, Result, StateMatrix};

/// Coefficients of the order 1–5 Bessel FIR filters; row `η − 1` holds the
/// `η` taps of filter `η`, zero padded.
pub const BESSEL_COEFFICIENTS: [[f64; 5]; 5] = [
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [1.7321, 1.0, 0.0, 0.0, 0.0],
    [2.4329, 2.4662, 1.0, 0.0, 0.0],
    [3.1239, 4.3916, 3.2011, 1.0, 0.0],
    [3.8107, 6.7767, 6.8864, 3.9363, 1.0],
];

/// An ordered set of FIR filters where filter `η` (1-based) has `η` taps.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FilterBank {
    filters: Vec<Vec<f64>>,
}

impl FilterBank {
    /// Builds a custom bank, checking that filter `η` has exactly `η` finite
    /// coefficients.
    pub fn new(filters: Vec<Vec<f64>>) -> Result<Self> {
        if filters.is_empty() {
            return Err(Error::param("filters", "bank must hold at least one filter"));
        }
        for (i, f) in filters.iter().enumerate() {
            if f.len() != i + 1 {
                return Err(Error::DimensionMismatch { expected: i + 1, found: f.len() });
            }
            if f.iter().any(|v| !v.is_finite()) {
                return Err(Error::param("filters", "coefficients must be finite"));
            }
        }
        Ok(FilterBank { filters })
    }

    pub fn filters(&self) -> &[Vec<f64>] {
        &self.filters
    }

    /// Number of filters `N_f`.
    pub fn len(&self) -> usize {
        self.filters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.filters.is_empty()
    }

    pub fn max_order(&self) -> usize {
        self.filters.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Bessel filters of orders `1..=n_filters`.
pub fn bessel_bank(n_filters: usize) -> Result<FilterBank> {
    if !(1..=BESSEL_COEFFICIENTS.len()).contains(&n_filters) {
        return Err(Error::param("n_filters", "Bessel coefficients exist for 1..=5 filters"));
    }
    let filters = BESSEL_COEFFICIENTS[..n_filters].iter().enumerate().map(|(i, row)| row[..=i].to_vec()).collect();
    FilterBank::new(filters)
}

/// Applies one FIR filter; samples before the series start are taken as zero.
pub fn apply_filter(coeffs: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    if x.is_empty() {
        return Err(Error::param("x", "series is empty"));
    }
    if coeffs.is_empty() {
        return Err(Error::param("coeffs", "filter has no taps"));
    }
    if x.len() < coeffs.len() {
        return Err(Error::InsufficientData { needed: coeffs.len(), available: x.len() });
    }
    Ok(filter_into(coeffs, x.iter().copied(), x.len()))
}

fn filter_into(coeffs: &[f64], x: impl Iterator<Item = f64>, len: usize) -> Vec<f64> {
    let mut history = vec![0.0; coeffs.len()];
    let mut out = Vec::with_capacity(len);
    for (t, v) in x.enumerate() {
        // history[t mod η] holds x(t); taps walk backwards from it.
        let taps = coeffs.len();
        history[t % taps] = v;
        let mut acc = 0.0;
        for (k, a) in coeffs.iter().enumerate() {
            acc += a * history[(t + taps - k) % taps];
        }
        out.push(acc);
    }
    out
}

/// Builds the filtered state matrix `Λ`.
///
/// Columns run node by node, each node contributing filters `1..=N_f`, and a
/// bias column of ones closes the matrix. The first `max_order − 1` rows are
/// flagged as startup rows.
pub fn assemble_filter_matrix(states: &StateMatrix, bank: &FilterBank) -> Result<StateMatrix> {
    if states.has_bias() {
        return Err(Error::BiasPresent);
    }
    if states.is_filtered() {
        return Err(Error::param("states", "input is already filtered"));
    }
    let n = states.nrows();
    if n < bank.max_order() {
        return Err(Error::InsufficientData { needed: bank.max_order(), available: n });
    }
    let cols = states.ncols() * bank.len() + 1;
    let mut data = DMatrix::zeros(n, cols);
    let mut labels = Vec::with_capacity(cols);
    for (j, label) in states.labels().iter().enumerate() {
        let node = match label {
            ColumnLabel::Node(i) => *i,
            _ => j + 1,
        };
        let source = states.data().column(j);
        for (f, coeffs) in bank.filters().iter().enumerate() {
            let y = filter_into(coeffs, source.iter().copied(), n);
            let col = j * bank.len() + f;
            data.column_mut(col).copy_from_slice(&y);
            labels.push(ColumnLabel::Filtered { node, order: coeffs.len() });
        }
    }
    data.column_mut(cols - 1).fill(1.0);
    labels.push(ColumnLabel::Bias);
    let startup = (bank.max_order() - 1).max(states.startup_rows());
    Ok(StateMatrix::from_parts(data, labels, states.node_count(), startup))
}

/// Update-time model for a reservoir of `M_f` nodes followed by filters of
/// maximum order `η`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdateTime {
    /// `M_f · t_s · (1 + η / 2)` seconds.
    pub update_time: f64,
    pub t_s: f64,
}

impl UpdateTime {
    /// Speed gain over an unfiltered reservoir of `nodes` nodes, whose update
    /// takes `nodes · t_s`.
    pub fn speedup_vs(&self, nodes: usize) -> f64 {
        nodes as f64 * self.t_s / self.update_time
    }

    /// Largest unfiltered size that is no faster than this configuration.
    pub fn break_even_nodes(&self) -> f64 {
        self.update_time / self.t_s
    }
}

/// `η = 0` models a reservoir without filters.
pub fn update_time_model(filtered_nodes: usize, t_s: f64, eta_max: usize) -> UpdateTime {
    UpdateTime { update_time: filtered_nodes as f64 * t_s * (1.0 + eta_max as f64 / 2.0), t_s }
}
