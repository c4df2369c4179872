use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::{Error, Result, StateMatrix};

/// Parameters of the delay-line laser map with `nodes` virtual nodes.
///
/// The loop's first-order low-pass filter has time constant `tau_r`; in map
/// steps of length `t_s` its memory is `tau_r / t_s` samples.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LaserReservoirSpec {
    pub nodes: usize,
    pub beta: f64,
    pub mu: f64,
    pub phi: f64,
    /// Gain applied to the input before masking.
    pub input_scale: f64,
    /// Map time step in seconds.
    pub t_s: f64,
    /// Low-pass time constant in seconds.
    pub tau_r: f64,
    /// Map steps between evaluation and write-back.
    pub tau_s: usize,
    /// Truncation length of the impulse response; `None` uses
    /// `ceil(10 · tau_r / t_s)`.
    pub impulse_len: Option<usize>,
    pub input_seed: u64,
}

impl LaserReservoirSpec {
    /// β = 0.5, μ = 0.1, φ = 0, t_s = 75 ns, τ_R = 1.5 µs.
    pub fn new(nodes: usize, input_seed: u64) -> Self {
        LaserReservoirSpec {
            nodes,
            beta: 0.5,
            mu: 0.1,
            phi: 0.0,
            input_scale: 1.0,
            t_s: 7.5e-8,
            tau_r: 1.5e-6,
            tau_s: 1,
            impulse_len: None,
            input_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes == 0 {
            return Err(Error::param("nodes", "must be at least 1"));
        }
        if !(self.t_s > 0.0) {
            return Err(Error::param("t_s", "must be positive"));
        }
        if !(self.tau_r > 0.0) {
            return Err(Error::param("tau_r", "must be positive"));
        }
        if self.tau_s == 0 {
            return Err(Error::param("tau_s", "must be at least 1"));
        }
        if self.impulse_len == Some(0) {
            return Err(Error::param("impulse_len", "must be at least 1"));
        }
        Ok(())
    }

    /// Filter memory in map steps, `tau_r / t_s`.
    pub fn memory_steps(&self) -> f64 {
        self.tau_r / self.t_s
    }

    pub fn impulse_len(&self) -> usize {
        self.impulse_len.unwrap_or_else(|| libm::ceil(10.0 * self.memory_steps()) as usize).max(1)
    }

    /// `H(j) ∝ exp(−j t_s / τ_R)` for `j = 1..=impulse_len`, normalized to
    /// unit sum. Element 0 holds `H(1)`.
    pub fn impulse_response(&self) -> Vec<f64> {
        let r = self.memory_steps();
        let mut h: Vec<f64> = (1..=self.impulse_len()).map(|j| libm::exp(-(j as f64) / r)).collect();
        let total: f64 = h.iter().sum();
        h.iter_mut().for_each(|v| *v /= total);
        h
    }
}

/// Iterates the laser map and reshapes it into virtual-node columns.
///
/// The scalar map is
/// `x(n + τ_s) = Σ_j β H(j) sin²(μ x(n − j) + W[n mod M] ρ s(⌊n / M⌋) + φ)`
/// with zero history. Sample `x(n)` lands in row `⌊n / M⌋`, column
/// `n mod M`; the first `transient_updates` rows are dropped.
pub fn run_laser(
    spec: &LaserReservoirSpec,
    input_weights: &[f64],
    input: &[f64],
    transient_updates: usize,
) -> Result<StateMatrix> {
    spec.validate()?;
    let m = spec.nodes;
    if input_weights.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: input_weights.len() });
    }
    if input.len() <= transient_updates {
        return Err(Error::InsufficientData { needed: transient_updates + 1, available: input.len() });
    }

    let h = spec.impulse_response();
    let len = h.len();
    let h_sum: f64 = h.iter().sum();
    // Reversed so that a window of past samples oldest-first dots with it.
    let h_rev: Vec<f64> = h.iter().rev().copied().collect();
    let total = input.len() * m;

    // sin²(a + b) = (1 − cos 2a cos 2b + sin 2a sin 2b) / 2, so only cos 2μx
    // and sin 2μx of past samples are needed. Slot k + len holds sample k;
    // zero history gives cos = 1, sin = 0.
    let mut cos_hist = vec![1.0; total + len];
    let mut sin_hist = vec![0.0; total + len];
    let mut out = DMatrix::zeros(input.len() - transient_updates, m);

    let half_beta = 0.5 * spec.beta;
    for step in 0..total {
        let x = match step.checked_sub(spec.tau_s) {
            None => 0.0,
            Some(n) => {
                let b = input_weights[n % m] * spec.input_scale * input[n / m] + spec.phi;
                let (sin2b, cos2b) = (libm::sin(2.0 * b), libm::cos(2.0 * b));
                let window = n..n + len;
                let c: f64 = cos_hist[window.clone()].iter().zip(&h_rev).map(|(a, b)| a * b).sum();
                let s: f64 = sin_hist[window].iter().zip(&h_rev).map(|(a, b)| a * b).sum();
                // Rounding can leave the identity form a few ulp below zero.
                (half_beta * (h_sum - cos2b * c + sin2b * s)).max(0.0)
            }
        };
        if !x.is_finite() {
            return Err(Error::Divergence { step });
        }
        let arg = 2.0 * spec.mu * x;
        cos_hist[step + len] = libm::cos(arg);
        sin_hist[step + len] = libm::sin(arg);
        let row = step / m;
        if row >= transient_updates {
            out[(row - transient_updates, step % m)] = x;
        }
    }
    StateMatrix::from_nodes(out)
}
