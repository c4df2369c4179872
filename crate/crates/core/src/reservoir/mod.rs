//! The two reservoir architectures: a leaky-tanh recurrent network and a
//! time-multiplexed delay-line laser map.

mod adjacency;
mod laser;
mod tanh;

use alloc::vec::Vec;

pub use adjacency::{build_adjacency, build_input_weights, Adjacency};
pub use laser::{run_laser, LaserReservoirSpec};
pub use tanh::{run_leaky_tanh, run_leaky_tanh_from, TanhReservoirSpec};

use crate::{Error, Result, StateMatrix};

/// How a raw drive signal is rescaled before it enters a reservoir.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum InputScaling {
    /// Zero mean, unit variance.
    #[default]
    Standardize,
    Raw,
    /// Divide by the largest absolute value.
    Maxabs,
}

/// Affine map `v ↦ (v − offset) · scale` fitted on a reference series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine {
    pub offset: f64,
    pub scale: f64,
}

impl InputScaling {
    pub fn fit(self, reference: &[f64]) -> Result<Affine> {
        if reference.is_empty() {
            return Err(Error::InsufficientData { needed: 1, available: 0 });
        }
        let n = reference.len() as f64;
        Ok(match self {
            InputScaling::Raw => Affine { offset: 0.0, scale: 1.0 },
            InputScaling::Standardize => {
                let mean = reference.iter().sum::<f64>() / n;
                let var = reference.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
                if var <= 0.0 {
                    return Err(Error::ZeroVariance);
                }
                Affine { offset: mean, scale: 1.0 / libm::sqrt(var) }
            }
            InputScaling::Maxabs => {
                let m = reference.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
                if m == 0.0 {
                    return Err(Error::ZeroVariance);
                }
                Affine { offset: 0.0, scale: 1.0 / m }
            }
        })
    }
}

impl Affine {
    pub fn apply(&self, series: &[f64]) -> Vec<f64> {
        series.iter().map(|v| (v - self.offset) * self.scale).collect()
    }
}

/// A fully constructed reservoir ready to be driven.
#[derive(Debug, Clone)]
pub enum Reservoir {
    LeakyTanh { spec: TanhReservoirSpec, adjacency: Adjacency, input_weights: Vec<f64> },
    Laser { spec: LaserReservoirSpec, input_weights: Vec<f64> },
}

impl Reservoir {
    /// Builds the adjacency matrix and input mask from the spec's seeds.
    pub fn leaky_tanh(spec: TanhReservoirSpec) -> Result<Self> {
        spec.validate()?;
        let adjacency = build_adjacency(spec.nodes, spec.density, spec.spectral_radius, spec.adjacency_seed)?;
        let input_weights = build_input_weights(spec.nodes, spec.input_seed);
        Ok(Reservoir::LeakyTanh { spec, adjacency, input_weights })
    }

    pub fn laser(spec: LaserReservoirSpec) -> Result<Self> {
        spec.validate()?;
        let input_weights = build_input_weights(spec.nodes, spec.input_seed);
        Ok(Reservoir::Laser { spec, input_weights })
    }

    pub fn nodes(&self) -> usize {
        match self {
            Reservoir::LeakyTanh { spec, .. } => spec.nodes,
            Reservoir::Laser { spec, .. } => spec.nodes,
        }
    }

    /// Drives the reservoir with `input` and returns the node states after
    /// `transient` input steps (one row per remaining input sample).
    pub fn run(&self, input: &[f64], transient: usize) -> Result<StateMatrix> {
        match self {
            Reservoir::LeakyTanh { spec, adjacency, input_weights } => {
                run_leaky_tanh(spec, adjacency, input_weights, input, transient)
            }
            Reservoir::Laser { spec, input_weights } => run_laser(spec, input_weights, input, transient),
        }
    }
}
