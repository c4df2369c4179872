use alloc::vec;

use nalgebra::{DMatrix, DVector};

use super::Adjacency;
use crate::{Error, Result, StateMatrix};

/// Parameters of a leaky-tanh reservoir.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TanhReservoirSpec {
    pub nodes: usize,
    /// Leak rate α: weight of the previous state.
    pub alpha: f64,
    pub spectral_radius: f64,
    /// Fraction of adjacency entries drawn nonzero.
    pub density: f64,
    pub adjacency_seed: u64,
    pub input_seed: u64,
}

impl TanhReservoirSpec {
    pub fn new(nodes: usize, alpha: f64, spectral_radius: f64) -> Self {
        TanhReservoirSpec { nodes, alpha, spectral_radius, density: 0.5, adjacency_seed: 1, input_seed: 2 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes == 0 {
            return Err(Error::param("nodes", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::param("alpha", "must lie in [0, 1]"));
        }
        if !(self.spectral_radius > 0.0) {
            return Err(Error::param("spectral_radius", "must be positive"));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(Error::param("density", "must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// Runs `χ(n+1) = α χ(n) + (1 − α) tanh(A χ(n) + w s(n) + 1)` from `χ = 0`.
///
/// Row `r` of the result is the state after consuming `s(transient + r)`.
pub fn run_leaky_tanh(
    spec: &TanhReservoirSpec,
    adjacency: &Adjacency,
    input_weights: &[f64],
    input: &[f64],
    transient: usize,
) -> Result<StateMatrix> {
    run_leaky_tanh_from(spec, adjacency, input_weights, input, transient, &vec![0.0; spec.nodes])
}

/// As [`run_leaky_tanh`], starting from an explicit initial state.
pub fn run_leaky_tanh_from(
    spec: &TanhReservoirSpec,
    adjacency: &Adjacency,
    input_weights: &[f64],
    input: &[f64],
    transient: usize,
    initial: &[f64],
) -> Result<StateMatrix> {
    let m = spec.nodes;
    spec.validate()?;
    if adjacency.matrix().nrows() != m {
        return Err(Error::DimensionMismatch { expected: m, found: adjacency.matrix().nrows() });
    }
    if input_weights.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: input_weights.len() });
    }
    if initial.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: initial.len() });
    }
    if input.len() <= transient {
        return Err(Error::InsufficientData { needed: transient + 1, available: input.len() });
    }

    let a = adjacency.matrix();
    let alpha = spec.alpha;
    let mut chi = DVector::from_column_slice(initial);
    let mut drive = DVector::zeros(m);
    let mut out = DMatrix::zeros(input.len() - transient, m);
    for (n, &s) in input.iter().enumerate() {
        drive.gemv(1.0, a, &chi, 0.0);
        for i in 0..m {
            let next = alpha * chi[i] + (1.0 - alpha) * libm::tanh(drive[i] + input_weights[i] * s + 1.0);
            if !next.is_finite() {
                return Err(Error::Divergence { step: n });
            }
            chi[i] = next;
        }
        if n >= transient {
            out.row_mut(n - transient).copy_from(&chi.transpose());
        }
    }
    StateMatrix::from_nodes(out)
}
