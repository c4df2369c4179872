//! Experiment families: Lorenz fitting and prediction, α×σ sweeps, Sprott
//! classification and memory capacity.
//!
//! Every (condition, trial) pair is an independent job. Trial `t` uses the
//! seed `derive_seed(master, [t])` for every condition, so conditions are
//! compared on common random numbers and each record can be recomputed from
//! the configuration and its seed alone.

use std::ops::Range;

use filtres_core::rng::{derive_seed, role};
use filtres_core::signals::{sprott_system, SPROTT_CATALOG, SPROTT_DT};
use filtres_core::{
    assemble_filter_matrix, assemble_state_matrix, bessel_bank, evaluate_error, generate_sprott, integrate_lorenz,
    memory_capacity, readout::train_ridge_ranked, train_ridge, FilterBank, InputScaling, LaserReservoirSpec,
    LorenzParams, MemoryOptions, Reservoir, StateMatrix, TanhReservoirSpec,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ClassTarget, Config, NodeType, SweepTarget};
use crate::{Error, Result};

/// Attempts at drawing a non-degenerate adjacency matrix before a trial is
/// recorded as failed.
const MAX_REDRAWS: u64 = 100;

pub const SYSTEMS: usize = 19;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    FitLorenzZ,
    PredictLorenzX,
    ClassifySprott,
    Memory,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::FitLorenzZ => "fit_lorenz_z",
            Task::PredictLorenzX => "predict_lorenz_x",
            Task::ClassifySprott => "classify_sprott",
            Task::Memory => "memory",
        }
    }
}

/// One (condition, seed) outcome. Metrics that do not apply to the task, or
/// that could not be computed because the trial failed, are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub task: Task,
    pub node_type: NodeType,
    pub nodes: usize,
    pub n_filters: usize,
    pub alpha: Option<f64>,
    pub sigma: Option<f64>,
    pub seed: u64,
    pub delta_train: Option<f64>,
    pub delta_test: Option<f64>,
    pub rank_omega: Option<usize>,
    pub rank_lambda: Option<usize>,
    pub mc: Option<f64>,
    pub pe: Option<f64>,
    pub diverged: bool,
}

impl Record {
    fn blank(task: Task, c: &Condition, n_filters: usize, seed: u64) -> Record {
        Record {
            task,
            node_type: c.node_type,
            nodes: c.nodes,
            n_filters,
            alpha: c.alpha,
            sigma: c.sigma,
            seed,
            delta_train: None,
            delta_test: None,
            rank_omega: None,
            rank_lambda: None,
            mc: None,
            pe: None,
            diverged: false,
        }
    }
}

/// Capacity per delay for one memory run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MemoryCurve {
    pub nodes: usize,
    pub n_filters: usize,
    pub seed: u64,
    pub per_delay: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub task: Task,
    pub records: Vec<Record>,
    pub curves: Vec<MemoryCurve>,
}

/// Mean and median of each metric over the trials of one condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionSummary {
    pub node_type: NodeType,
    pub nodes: usize,
    pub n_filters: usize,
    pub alpha: Option<f64>,
    pub sigma: Option<f64>,
    pub trials: usize,
    pub diverged: usize,
    pub delta_train: Stat,
    pub delta_test: Stat,
    pub rank_omega: Stat,
    pub rank_lambda: Stat,
    pub mc: Stat,
    pub pe: Stat,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct Stat {
    pub mean: Option<f64>,
    pub median: Option<f64>,
}

impl Stat {
    pub fn of(values: impl Iterator<Item = f64>) -> Stat {
        let mut v: Vec<f64> = values.collect();
        if v.is_empty() {
            return Stat::default();
        }
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let median = if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) };
        Stat { mean: Some(v.iter().sum::<f64>() / n as f64), median: Some(median) }
    }
}

impl ExperimentReport {
    /// Condition summaries in first-appearance order.
    pub fn summary(&self) -> Vec<ConditionSummary> {
        let mut keys: Vec<(NodeType, usize, usize, Option<f64>, Option<f64>)> = Vec::new();
        for r in &self.records {
            let k = (r.node_type, r.nodes, r.n_filters, r.alpha, r.sigma);
            if !keys.contains(&k) {
                keys.push(k);
            }
        }
        keys.into_iter()
            .map(|(node_type, nodes, n_filters, alpha, sigma)| {
                let group: Vec<&Record> = self
                    .records
                    .iter()
                    .filter(|r| {
                        (r.node_type, r.nodes, r.n_filters, r.alpha, r.sigma)
                            == (node_type, nodes, n_filters, alpha, sigma)
                    })
                    .collect();
                let stat = |f: fn(&Record) -> Option<f64>| Stat::of(group.iter().filter_map(|r| f(r)));
                ConditionSummary {
                    node_type,
                    nodes,
                    n_filters,
                    alpha,
                    sigma,
                    trials: group.len(),
                    diverged: group.iter().filter(|r| r.diverged).count(),
                    delta_train: stat(|r| r.delta_train),
                    delta_test: stat(|r| r.delta_test),
                    rank_omega: stat(|r| r.rank_omega.map(|v| v as f64)),
                    rank_lambda: stat(|r| r.rank_lambda.map(|v| v as f64)),
                    mc: stat(|r| r.mc),
                    pe: stat(|r| r.pe),
                }
            })
            .collect()
    }

    /// Within-seed ratios `metric(N_f = n) / metric(N_f = 0)` for every
    /// record with `n` filters that has a non-failed baseline.
    pub fn paired_ratios(&self, n_filters: usize, metric: fn(&Record) -> Option<f64>) -> Vec<(&Record, f64)> {
        self.records
            .iter()
            .filter(|r| r.n_filters == n_filters)
            .filter_map(|r| {
                let base = self.records.iter().find(|b| {
                    b.n_filters == 0
                        && (b.node_type, b.nodes, b.alpha, b.sigma, b.seed)
                            == (r.node_type, r.nodes, r.alpha, r.sigma, r.seed)
                })?;
                Some((r, metric(r)? / metric(base)?))
            })
            .collect()
    }
}

/// Reservoir hyperparameters for one condition.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Condition {
    node_type: NodeType,
    nodes: usize,
    alpha: Option<f64>,
    sigma: Option<f64>,
}

/// Seed of trial `t`, shared by every condition.
pub fn trial_seed(master: u64, trial: usize) -> u64 {
    derive_seed(master, &[trial as u64])
}

fn build_reservoir(cfg: &Config, c: &Condition, seed: u64) -> filtres_core::Result<Reservoir> {
    let r = &cfg.reservoir;
    match c.node_type {
        NodeType::LeakyTanh => {
            let mut last = None;
            for redraw in 0..MAX_REDRAWS {
                let spec = TanhReservoirSpec {
                    nodes: c.nodes,
                    alpha: c.alpha.unwrap_or(r.alpha),
                    spectral_radius: c.sigma.unwrap_or(r.spectral_radius),
                    density: r.density,
                    adjacency_seed: derive_seed(seed, &[role::ADJACENCY, redraw]),
                    input_seed: derive_seed(seed, &[role::INPUT_WEIGHTS, 0]),
                };
                match Reservoir::leaky_tanh(spec) {
                    Err(e @ filtres_core::Error::DegenerateMatrix { .. }) => last = Some(e),
                    other => return other,
                }
            }
            Err(last.expect("at least one draw"))
        }
        NodeType::Laser => Reservoir::laser(LaserReservoirSpec {
            nodes: c.nodes,
            beta: r.beta,
            mu: r.mu,
            phi: r.phi,
            input_scale: r.input_scale,
            t_s: r.t_s,
            tau_r: r.tau_r,
            tau_s: r.tau_s,
            impulse_len: r.impulse_len,
            input_seed: derive_seed(seed, &[role::INPUT_WEIGHTS, 0]),
        }),
    }
}

/// Trial failures that are recorded rather than propagated.
fn is_trial_failure(e: &filtres_core::Error) -> bool {
    matches!(
        e,
        filtres_core::Error::Divergence { .. }
            | filtres_core::Error::DegenerateMatrix { .. }
            | filtres_core::Error::NoConvergence(_)
            | filtres_core::Error::ZeroVariance
    )
}

/// Filter banks for each requested count (`None` for the baseline).
#[derive(Debug, Clone)]
pub struct Banks {
    banks: Vec<(usize, Option<FilterBank>)>,
}

impl Banks {
    pub fn from_config(cfg: &Config) -> Result<Banks> {
        let custom = match &cfg.filters.bank_file {
            Some(path) => Some(crate::io::read_filter_bank(path)?),
            None => None,
        };
        let banks = cfg
            .filter_counts()
            .into_iter()
            .map(|n| {
                let bank = match (n, &custom) {
                    (0, _) => None,
                    (n, Some(bank)) => {
                        if n > bank.len() {
                            return Err(Error::config(
                                "filters.counts",
                                format!("bank file has only {} filters", bank.len()),
                            ));
                        }
                        Some(FilterBank::new(bank.filters()[..n].to_vec())?)
                    }
                    (n, None) => Some(bessel_bank(n).map_err(|e| Error::config("filters.counts", e.to_string()))?),
                };
                Ok((n, bank))
            })
            .collect::<Result<_>>()?;
        Ok(Banks { banks })
    }

    /// Rows of real history every filter needs before the fitting window.
    pub fn history(&self) -> usize {
        self.banks.iter().filter_map(|(_, b)| b.as_ref()).map(|b| b.max_order() - 1).max().unwrap_or(0)
    }

    pub fn counts(&self) -> impl Iterator<Item = usize> + '_ {
        self.banks.iter().map(|(n, _)| *n)
    }

    /// `Ω` and every `Λ` from one set of raw states whose first `history`
    /// rows are pre-window history.
    fn features(&self, states: StateMatrix) -> filtres_core::Result<Vec<StateMatrix>> {
        let h = self.history();
        let labels = states.labels().to_vec();
        let flagged = StateMatrix::with_labels(states.into_data(), labels, h)?;
        self.banks
            .iter()
            .map(|(_, bank)| match bank {
                None => assemble_state_matrix(&flagged),
                Some(bank) => assemble_filter_matrix(&flagged, bank),
            })
            .collect()
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| Error::config("task.jobs", e.to_string()))
}

/// Runs `f` over `items` on a pool of `jobs` workers, keeping input order.
fn par_map<T: Sync, R: Send>(jobs: usize, items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Result<Vec<R>> {
    Ok(pool(jobs)?.install(|| items.par_iter().map(f).collect()))
}

/// Drive and target for one window, aligned sample by sample.
#[derive(Debug, Clone)]
struct Window {
    input: Vec<f64>,
    target: Vec<f64>,
}

#[derive(Debug, Clone)]
struct RegressionData {
    train: Window,
    test: Window,
}

fn lorenz_data(cfg: &Config, predict: bool) -> Result<RegressionData> {
    let t = &cfg.task;
    let horizon = if predict { t.horizon } else { 0 };
    let make = |x0: [f64; 3], len: usize| -> Result<(Vec<f64>, Vec<f64>)> {
        if predict && horizon >= len {
            return Err(Error::config(
                "task.horizon",
                format!("horizon {horizon} is not shorter than the window {len}"),
            ));
        }
        let params = LorenzParams { x0, ..LorenzParams::default() };
        let s = integrate_lorenz(&params, t.transient + len + horizon, t.transient)?;
        let n = t.transient + len;
        if predict {
            Ok((s.column(0)[..n].to_vec(), s.column(0)[horizon..].to_vec()))
        } else {
            Ok((s.column(0).to_vec(), s.column(2).to_vec()))
        }
    };
    let (train_x, train_g) = make(t.train_x0, t.train_len)?;
    let (test_x, test_g) = make(t.test_x0, t.test_len)?;
    let scale = cfg.reservoir.input_scaling().fit(&train_x)?;
    Ok(RegressionData {
        train: Window { input: scale.apply(&train_x), target: train_g },
        test: Window { input: scale.apply(&test_x), target: test_g },
    })
}

fn regression_trial(
    cfg: &Config,
    task: Task,
    data: &RegressionData,
    banks: &Banks,
    c: &Condition,
    trial: usize,
) -> Result<Vec<Record>> {
    let seed = trial_seed(cfg.task.seed, trial);
    match regression_metrics(cfg, task, data, banks, c, seed) {
        Ok(records) => Ok(records),
        Err(e) if is_trial_failure(&e) => {
            Ok(banks.counts().map(|n| Record { diverged: true, ..Record::blank(task, c, n, seed) }).collect())
        }
        Err(e) => Err(e.into()),
    }
}

fn regression_metrics(
    cfg: &Config,
    task: Task,
    data: &RegressionData,
    banks: &Banks,
    c: &Condition,
    seed: u64,
) -> filtres_core::Result<Vec<Record>> {
    let h = banks.history();
    let start = cfg
        .task
        .transient
        .checked_sub(h)
        .ok_or(filtres_core::Error::InsufficientData { needed: h, available: cfg.task.transient })?;
    let reservoir = build_reservoir(cfg, c, seed)?;
    let train = banks.features(reservoir.run(&data.train.input, start)?)?;
    let test = banks.features(reservoir.run(&data.test.input, start)?)?;
    let g_train = &data.train.target[start..];
    let g_test = &data.test.target[start..];

    let mut records = Vec::new();
    let mut rank_omega = None;
    for ((n, x_train), x_test) in banks.counts().zip(&train).zip(&test) {
        let (model, rank) = train_ridge_ranked(x_train, g_train, cfg.task.ridge())?;
        let delta_test = evaluate_error(x_test, &model, g_test)?;
        if n == 0 {
            rank_omega = Some(rank.rank);
        }
        records.push(Record {
            delta_train: Some(model.training_error),
            delta_test: Some(delta_test),
            rank_omega,
            rank_lambda: (n > 0).then_some(rank.rank),
            ..Record::blank(task, c, n, seed)
        });
    }
    Ok(records)
}

fn conditions(cfg: &Config) -> Vec<Condition> {
    let r = &cfg.reservoir;
    r.nodes
        .iter()
        .map(|&nodes| match r.kind {
            NodeType::LeakyTanh => {
                Condition { node_type: r.kind, nodes, alpha: Some(r.alpha), sigma: Some(r.spectral_radius) }
            }
            NodeType::Laser => Condition { node_type: r.kind, nodes, alpha: None, sigma: None },
        })
        .collect()
}

fn run_regression(cfg: &Config, task: Task, conds: &[Condition], trials: usize) -> Result<ExperimentReport> {
    let predict = task == Task::PredictLorenzX;
    let data = lorenz_data(cfg, predict)?;
    let banks = Banks::from_config(cfg)?;
    let jobs: Vec<(Condition, usize)> = conds.iter().flat_map(|c| (0..trials).map(move |t| (*c, t))).collect();
    let results = par_map(cfg.task.jobs, &jobs, |(c, t)| regression_trial(cfg, task, &data, &banks, c, *t))?;
    let records = results.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect();
    Ok(ExperimentReport { task, records, curves: Vec::new() })
}

/// Drives each configured reservoir with Lorenz `x` and fits Lorenz `z`;
/// training and testing trajectories start from different initial
/// conditions.
pub fn run_fitting(cfg: &Config) -> Result<ExperimentReport> {
    run_regression(cfg, Task::FitLorenzZ, &conditions(cfg), cfg.task.trials)
}

/// Open-loop prediction of Lorenz `x`, `task.horizon` samples ahead.
pub fn run_prediction(cfg: &Config) -> Result<ExperimentReport> {
    run_regression(cfg, Task::PredictLorenzX, &conditions(cfg), cfg.task.trials)
}

/// Leaky-tanh α×σ grid. Records come out ordered by size, then α, then σ,
/// then trial.
pub fn run_sweep(cfg: &Config) -> Result<ExperimentReport> {
    if cfg.reservoir.kind != NodeType::LeakyTanh {
        return Err(Error::config("reservoir.kind", "sweeps need a leaky_tanh reservoir"));
    }
    let mut conds = Vec::new();
    for &nodes in &cfg.reservoir.nodes {
        for &alpha in &cfg.sweep.alphas {
            for &sigma in &cfg.sweep.sigmas {
                conds.push(Condition { node_type: NodeType::LeakyTanh, nodes, alpha: Some(alpha), sigma: Some(sigma) });
            }
        }
    }
    let task = match cfg.sweep.target {
        SweepTarget::Fit => Task::FitLorenzZ,
        SweepTarget::Predict => Task::PredictLorenzX,
    };
    run_regression(cfg, task, &conds, cfg.sweep.trials)
}

/// Memory capacity under a raw U(-1, 1) drive.
pub fn run_memory(cfg: &Config) -> Result<ExperimentReport> {
    let banks = Banks::from_config(cfg)?;
    let h = banks.history();
    let start = cfg
        .task
        .memory_transient
        .checked_sub(h)
        .ok_or_else(|| Error::config("task.memory_transient", format!("must be at least {h}")))?;
    let options = MemoryOptions {
        samples: cfg.task.memory_samples,
        k_max: cfg.task.k_max,
        ridge: cfg.task.ridge(),
        train_fraction: cfg.task.train_fraction,
        formula: cfg.task.capacity_formula,
    };
    let conds = conditions(cfg);
    let jobs: Vec<(Condition, usize)> = conds.iter().flat_map(|c| (0..cfg.task.trials).map(move |t| (*c, t))).collect();
    let results = par_map(cfg.task.jobs, &jobs, |(c, t)| -> Result<Vec<(Record, Option<MemoryCurve>)>> {
        let seed = trial_seed(cfg.task.seed, *t);
        let noise_seed = derive_seed(seed, &[role::NOISE]);
        let reservoir = match build_reservoir(cfg, c, seed) {
            Ok(r) => Some(r),
            Err(e) if is_trial_failure(&e) => None,
            Err(e) => return Err(e.into()),
        };
        let mut out = Vec::new();
        for (i, n) in banks.counts().enumerate() {
            let blank = Record::blank(Task::Memory, c, n, seed);
            let Some(reservoir) = &reservoir else {
                out.push((Record { diverged: true, ..blank }, None));
                continue;
            };
            let runner = |drive: &[f64]| banks.features(reservoir.run(drive, start)?).map(|mut f| f.swap_remove(i));
            match memory_capacity(runner, noise_seed, &options) {
                Ok(report) => out.push((
                    Record { mc: Some(report.total), ..blank },
                    Some(MemoryCurve { nodes: c.nodes, n_filters: n, seed, per_delay: report.per_delay }),
                )),
                Err(e) if is_trial_failure(&e) => out.push((Record { diverged: true, ..blank }, None)),
                Err(e) => return Err(e.into()),
            }
        }
        Ok(out)
    })?;
    let mut report = ExperimentReport { task: Task::Memory, records: Vec::new(), curves: Vec::new() };
    for (record, curve) in results.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten() {
        report.records.push(record);
        report.curves.extend(curve);
    }
    Ok(report)
}

/// Outcome of one classification run (one size, bank and trial).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub node_type: NodeType,
    pub nodes: usize,
    pub n_filters: usize,
    pub seed: u64,
    /// Mean node coefficients (bias excluded) per system.
    pub library: Vec<Vec<f64>>,
    /// `confusion[true][predicted]` over the held-out sections.
    pub confusion: Vec<Vec<usize>>,
    pub pe: f64,
    /// Error rate when the training sections themselves are classified.
    pub resubstitution_pe: f64,
}

/// Sample ranges of each section of one system's long series: input
/// samples used for the drive plus any target look-ahead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionLayout {
    pub train: Vec<Range<usize>>,
    pub test: Vec<Range<usize>>,
    pub series_len: usize,
}

pub fn section_layout(cfg: &Config) -> SectionLayout {
    let t = &cfg.task;
    let lookahead = match t.class_target {
        ClassTarget::PredictNext => 1,
        ClassTarget::Reconstruct => 0,
    };
    let stride = t.section_transient + t.section_len + lookahead;
    let range = |j: usize| j * stride..(j + 1) * stride;
    SectionLayout {
        train: (0..t.train_sections).map(range).collect(),
        test: (t.train_sections..t.train_sections + t.test_sections).map(range).collect(),
        series_len: (t.train_sections + t.test_sections) * stride,
    }
}

/// Standardized `x` series of every Sprott system, long enough for all
/// sections.
fn sprott_series(cfg: &Config, len: usize) -> Result<Vec<Vec<f64>>> {
    (1..=SYSTEMS)
        .into_par_iter()
        .map(|id| {
            let sys = sprott_system(id)?;
            let x = generate_sprott(id, SPROTT_DT, len, cfg.task.transient, sys.initial_condition)?
                .into_columns()
                .remove(0);
            Ok(InputScaling::Standardize.fit(&x)?.apply(&x))
        })
        .collect()
}

/// Node coefficients of every bank for one section.
fn section_coefficients(
    cfg: &Config,
    reservoir: &Reservoir,
    banks: &Banks,
    series: &[f64],
    range: &Range<usize>,
) -> filtres_core::Result<Vec<Vec<f64>>> {
    let t = &cfg.task;
    let h = banks.history();
    let start = t
        .section_transient
        .checked_sub(h)
        .ok_or(filtres_core::Error::InsufficientData { needed: h, available: t.section_transient })?;
    let drive_len = t.section_transient + t.section_len;
    let drive = &series[range.start..range.start + drive_len];
    let target: Vec<f64> = match t.class_target {
        ClassTarget::PredictNext => series[range.start + 1..range.start + drive_len + 1].to_vec(),
        ClassTarget::Reconstruct => drive.to_vec(),
    };
    debug_assert!(range.start + drive_len + usize::from(t.class_target == ClassTarget::PredictNext) <= range.end);
    let features = banks.features(reservoir.run(drive, start)?)?;
    features.iter().map(|x| Ok(train_ridge(x, &target[start..], t.ridge())?.node_coefficients().to_vec())).collect()
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(library: &[Vec<f64>], c: &[f64]) -> usize {
    let mut best = (0, f64::INFINITY);
    for (k, reference) in library.iter().enumerate() {
        let d = squared_distance(reference, c);
        if d < best.1 {
            best = (k, d);
        }
    }
    best.0
}

/// Nearest-reference classification of the 19 Sprott systems from readout
/// coefficients.
pub fn run_classification(cfg: &Config) -> Result<Vec<ClassificationReport>> {
    let layout = section_layout(cfg);
    let train_end = layout.train.last().map_or(0, |r| r.end);
    assert!(layout.test.iter().all(|r| r.start >= train_end), "test sections overlap training sections");
    let series = sprott_series(cfg, layout.series_len)?;
    let banks = Banks::from_config(cfg)?;
    let pool = pool(cfg.task.jobs)?;
    let mut reports = Vec::new();
    for c in conditions(cfg) {
        for trial in 0..cfg.task.trials {
            let seed = trial_seed(cfg.task.seed, trial);
            let reservoir = build_reservoir(cfg, &c, seed)?;
            let sections: Vec<(usize, bool, &Range<usize>)> = (0..SYSTEMS)
                .flat_map(|k| {
                    let train = layout.train.iter().map(move |r| (k, true, r));
                    let test = layout.test.iter().map(move |r| (k, false, r));
                    train.chain(test)
                })
                .collect();
            let coeffs: Vec<Vec<Vec<f64>>> = pool.install(|| {
                sections
                    .par_iter()
                    .map(|(k, _, r)| section_coefficients(cfg, &reservoir, &banks, &series[*k], r))
                    .collect::<filtres_core::Result<_>>()
            })?;
            for (i, n) in banks.counts().enumerate() {
                reports.push(classify(&c, n, seed, &sections, &coeffs, i));
            }
        }
    }
    Ok(reports)
}

fn classify(
    c: &Condition,
    n_filters: usize,
    seed: u64,
    sections: &[(usize, bool, &Range<usize>)],
    coeffs: &[Vec<Vec<f64>>],
    bank: usize,
) -> ClassificationReport {
    let width = coeffs[0][bank].len();
    let mut library = vec![vec![0.0; width]; SYSTEMS];
    let mut counts = [0usize; SYSTEMS];
    for ((k, is_train, _), cs) in sections.iter().zip(coeffs) {
        if *is_train {
            library[*k].iter_mut().zip(&cs[bank]).for_each(|(l, v)| *l += v);
            counts[*k] += 1;
        }
    }
    for (row, n) in library.iter_mut().zip(counts) {
        row.iter_mut().for_each(|v| *v /= n as f64);
    }
    let mut confusion = vec![vec![0usize; SYSTEMS]; SYSTEMS];
    let (mut resub_errors, mut resub_total) = (0usize, 0usize);
    for ((k, is_train, _), cs) in sections.iter().zip(coeffs) {
        let predicted = nearest(&library, &cs[bank]);
        if *is_train {
            resub_total += 1;
            resub_errors += usize::from(predicted != *k);
        } else {
            confusion[*k][predicted] += 1;
        }
    }
    let total: usize = confusion.iter().flatten().sum();
    let correct: usize = (0..SYSTEMS).map(|k| confusion[k][k]).sum();
    ClassificationReport {
        node_type: c.node_type,
        nodes: c.nodes,
        n_filters,
        seed,
        library,
        confusion,
        pe: (total - correct) as f64 / total as f64,
        resubstitution_pe: resub_errors as f64 / resub_total as f64,
    }
}

/// Long-form records (one per classification run) carrying `P_E`.
pub fn classification_records(reports: &[ClassificationReport], cfg: &Config) -> ExperimentReport {
    let records = reports
        .iter()
        .map(|r| {
            let (alpha, sigma) = match r.node_type {
                NodeType::LeakyTanh => (Some(cfg.reservoir.alpha), Some(cfg.reservoir.spectral_radius)),
                NodeType::Laser => (None, None),
            };
            let c = Condition { node_type: r.node_type, nodes: r.nodes, alpha, sigma };
            Record { pe: Some(r.pe), ..Record::blank(Task::ClassifySprott, &c, r.n_filters, r.seed) }
        })
        .collect();
    ExperimentReport { task: Task::ClassifySprott, records, curves: Vec::new() }
}

/// System labels `A` .. `S`.
pub fn system_labels() -> Vec<String> {
    SPROTT_CATALOG.iter().map(|s| s.label.to_string()).collect()
}
