//! Experiment configuration: a TOML file with the sections `[reservoir]`,
//! `[filters]`, `[task]`, `[sweep]` and `[output]`.
//!
//! Every field has a default, so an empty file is a valid configuration.
//! Unknown keys are rejected.

use std::path::{Path, PathBuf};

use filtres_core::{CapacityFormula, InputScaling, Ridge};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const SEED_ENV: &str = "FILTRES_SEED";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub reservoir: ReservoirConfig,
    pub filters: FiltersConfig,
    pub task: TaskConfig,
    pub sweep: SweepConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NodeType {
    #[default]
    LeakyTanh,
    Laser,
}

impl NodeType {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeType::LeakyTanh => "leaky_tanh",
            NodeType::Laser => "laser",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReservoirConfig {
    pub kind: NodeType,
    /// Reservoir sizes to run; each is a separate condition.
    pub nodes: Vec<usize>,
    pub alpha: f64,
    pub spectral_radius: f64,
    pub density: f64,
    /// Affine map applied to the drive before it enters the reservoir.
    /// Unset means the node type's default: `raw` for leaky tanh and
    /// `standardize` for the laser, whose input gain is `input_scale`.
    pub normalize_input: Option<InputScaling>,
    // Laser map parameters.
    pub beta: f64,
    pub mu: f64,
    pub phi: f64,
    pub input_scale: f64,
    pub t_s: f64,
    pub tau_r: f64,
    pub tau_s: usize,
    pub impulse_len: Option<usize>,
}

impl Default for ReservoirConfig {
    fn default() -> Self {
        ReservoirConfig {
            kind: NodeType::LeakyTanh,
            nodes: vec![100],
            alpha: 0.75,
            spectral_radius: 0.48,
            density: 0.5,
            normalize_input: None,
            beta: 0.5,
            mu: 0.1,
            phi: 0.0,
            input_scale: 1.0,
            t_s: 7.5e-8,
            tau_r: 1.5e-6,
            tau_s: 1,
            impulse_len: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FiltersConfig {
    /// Bank sizes `N_f` to evaluate. The reservoir-only condition `N_f = 0`
    /// is always run alongside.
    pub counts: Vec<usize>,
    /// Custom bank in the TOML format of [`crate::io::write_filter_bank`];
    /// the built-in Bessel table is used when absent.
    pub bank_file: Option<PathBuf>,
}

impl ReservoirConfig {
    pub fn input_scaling(&self) -> InputScaling {
        self.normalize_input.unwrap_or(match self.kind {
            NodeType::LeakyTanh => InputScaling::Raw,
            NodeType::Laser => InputScaling::Standardize,
        })
    }
}

impl Default for FiltersConfig {
    fn default() -> Self {
        FiltersConfig { counts: vec![5], bank_file: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RidgeMode {
    /// `lambda` is multiplied by `trace(XᵀX) / cols(X)`.
    #[default]
    Relative,
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ClassTarget {
    /// Fit `s(n + 1)` from the states driven by `s(n)`.
    #[default]
    PredictNext,
    /// Fit `s(n)` itself.
    Reconstruct,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TaskConfig {
    pub seed: u64,
    pub trials: usize,
    /// Input samples discarded before the fitting window.
    pub transient: usize,
    pub train_len: usize,
    pub test_len: usize,
    /// Prediction horizon in samples.
    pub horizon: usize,
    pub lambda: f64,
    pub ridge_mode: RidgeMode,
    pub train_x0: [f64; 3],
    pub test_x0: [f64; 3],
    pub train_sections: usize,
    pub test_sections: usize,
    pub section_transient: usize,
    pub section_len: usize,
    pub class_target: ClassTarget,
    pub memory_samples: usize,
    pub memory_transient: usize,
    pub k_max: usize,
    pub train_fraction: f64,
    pub capacity_formula: CapacityFormula,
    /// Worker threads; 0 uses every core.
    pub jobs: usize,
}

impl Default for TaskConfig {
    fn default() -> Self {
        TaskConfig {
            seed: 1,
            trials: 1,
            transient: 1000,
            train_len: 10_000,
            test_len: 10_000,
            horizon: 13,
            lambda: 1e-6,
            ridge_mode: RidgeMode::Relative,
            train_x0: [1.0, 1.0, 20.0],
            test_x0: [-3.0, 5.0, 15.0],
            train_sections: 100,
            test_sections: 100,
            section_transient: 1000,
            section_len: 1000,
            class_target: ClassTarget::PredictNext,
            memory_samples: 11_000,
            memory_transient: 1000,
            k_max: 50,
            train_fraction: 0.8,
            capacity_formula: CapacityFormula::SquaredCorrelation,
            jobs: 0,
        }
    }
}

impl TaskConfig {
    pub fn ridge(&self) -> Ridge {
        match self.ridge_mode {
            RidgeMode::Relative => Ridge::Relative(self.lambda),
            RidgeMode::Fixed => Ridge::Fixed(self.lambda),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SweepTarget {
    #[default]
    Fit,
    Predict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub alphas: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub trials: usize,
    pub target: SweepTarget,
}

/// Dotted key (`section.key`) of the entry at byte `pos`; errors on a value
/// point at the value, so the key is taken from the left of `=`.
fn key_at(text: &str, pos: usize) -> String {
    let line_start = text[..pos].rfind('\n').map_or(0, |i| i + 1);
    let line_end = text[pos..].find('\n').map_or(text.len(), |i| pos + i);
    let line = &text[line_start..line_end];
    let key = match line.split_once('=') {
        Some((k, _)) => k.trim(),
        None => line.trim(),
    };
    let section = text[..line_start]
        .lines()
        .rev()
        .map(str::trim)
        .find(|l| l.starts_with('[') && !l.starts_with("[["))
        .map(|l| l.trim_matches(|c| c == '[' || c == ']').trim());
    match section {
        Some(sec) if !key.starts_with('[') => format!("{sec}.{key}"),
        _ => key.to_owned(),
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect(),
    }
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            alphas: linspace(0.05, 1.0, 10),
            sigmas: linspace(0.1, 3.0, 10),
            trials: 5,
            target: SweepTarget::Fit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: PathBuf::from("out") }
    }
}

/// Command-line values that take precedence over the file and environment.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub nodes: Option<Vec<usize>>,
    pub filters: Option<Vec<usize>>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Config> {
        toml::from_str(text).map_err(|e| {
            let key = e.span().map(|s| key_at(text, s.start)).unwrap_or_default();
            Error::config(key, e.message().to_owned())
        })
    }

    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Config::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    /// Applies `FILTRES_SEED` from `env` and then the command-line overrides.
    pub fn resolve(mut self, env_seed: Option<&str>, overrides: &Overrides) -> Result<Config> {
        if let Some(v) = env_seed {
            self.task.seed =
                v.trim().parse().map_err(|_| Error::config(SEED_ENV, format!("not an unsigned integer: {v:?}")))?;
        }
        if let Some(seed) = overrides.seed {
            self.task.seed = seed;
        }
        if let Some(nodes) = &overrides.nodes {
            self.reservoir.nodes = nodes.clone();
        }
        if let Some(filters) = &overrides.filters {
            self.filters.counts = filters.clone();
        }
        if let Some(jobs) = overrides.jobs {
            self.task.jobs = jobs;
        }
        if let Some(out) = &overrides.out {
            self.output.dir = out.clone();
        }
        self.reservoir.normalize_input = Some(self.reservoir.input_scaling());
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let r = &self.reservoir;
        let t = &self.task;
        let check = |ok: bool, key: &str, msg: &str| if ok { Ok(()) } else { Err(Error::config(key, msg)) };
        check(
            !r.nodes.is_empty() && r.nodes.iter().all(|&m| m >= 1),
            "reservoir.nodes",
            "need at least one size, each ≥ 1",
        )?;
        check((0.0..=1.0).contains(&r.alpha), "reservoir.alpha", "must lie in [0, 1]")?;
        check(r.spectral_radius > 0.0, "reservoir.spectral_radius", "must be positive")?;
        check(r.density > 0.0 && r.density <= 1.0, "reservoir.density", "must lie in (0, 1]")?;
        check(self.filters.counts.iter().all(|&n| n <= 64), "filters.counts", "bank sizes above 64 are not supported")?;
        check(t.trials >= 1, "task.trials", "must be at least 1")?;
        check(t.train_len >= 2 && t.test_len >= 2, "task.train_len", "windows need at least two samples")?;
        check(t.horizon >= 1, "task.horizon", "must be at least 1")?;
        check(t.lambda >= 0.0, "task.lambda", "must be nonnegative")?;
        check(t.train_sections >= 1 && t.test_sections >= 1, "task.train_sections", "need at least one section each")?;
        check(t.section_len >= 2, "task.section_len", "must be at least 2")?;
        check(t.k_max >= 1, "task.k_max", "must be at least 1")?;
        check(!self.sweep.alphas.is_empty(), "sweep.alphas", "grid is empty")?;
        check(!self.sweep.sigmas.is_empty(), "sweep.sigmas", "grid is empty")?;
        check(self.sweep.trials >= 1, "sweep.trials", "must be at least 1")?;
        Ok(())
    }

    /// Filter counts with the reservoir-only baseline first, sorted and
    /// deduplicated.
    pub fn filter_counts(&self) -> Vec<usize> {
        let mut counts = self.filters.counts.clone();
        counts.push(0);
        counts.sort_unstable();
        counts.dedup();
        counts
    }
}
