//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs with `harness = false` so the report is printed even when every
//! criterion passes. Set `ACCEPTANCE_ONLY=4,7` to run a subset (criterion 12
//! reruns whichever of 4..=11 were selected).

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use filtres::config::{linspace, Config, NodeType};
use filtres::experiments::{classification_records, ExperimentReport};
use filtres::io::results_csv;
use filtres::{run_classification, run_fitting, run_memory, run_prediction, run_sweep};
use filtres_core::rng::{rng_from_seed, uniform_symmetric};
use filtres_core::{covariance_rank, train_ridge, update_time_model, Ridge, StateMatrix};
use nalgebra::DMatrix;

struct Outcome {
    pass: bool,
    detail: String,
    /// Result tables whose bytes must be reproducible.
    artifacts: Vec<Vec<u8>>,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Outcome {
        Outcome { pass, detail: detail.into(), artifacts: Vec::new() }
    }

    fn with(mut self, report: &ExperimentReport) -> Outcome {
        self.artifacts.push(results_csv(report).unwrap());
        self
    }
}

fn base_config() -> Config {
    let mut cfg = Config::default();
    cfg.task.jobs = 0;
    cfg
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn std(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() as f64 - 1.0)).sqrt()
}

/// Per-seed ratios `metric(N_f = n) / metric(N_f = 0)` at size `m`.
fn ratios(report: &ExperimentReport, m: usize, n: usize, metric: fn(&filtres::Record) -> Option<f64>) -> Vec<f64> {
    report.paired_ratios(n, metric).into_iter().filter(|(r, _)| r.nodes == m).map(|(_, v)| v).collect()
}

fn delta_test(report: &ExperimentReport, m: usize, n: usize) -> Vec<f64> {
    report.records.iter().filter(|r| r.nodes == m && r.n_filters == n).filter_map(|r| r.delta_test).collect()
}

fn c1_identity_filter() -> Outcome {
    let mut worst = 0.0_f64;
    let mut ranks_equal = true;
    let mut configs = Vec::new();
    for (kind, nodes) in [(NodeType::LeakyTanh, vec![10, 40]), (NodeType::Laser, vec![15])] {
        let mut cfg = base_config();
        cfg.reservoir.kind = kind;
        cfg.reservoir.nodes = nodes;
        cfg.filters.counts = vec![1];
        cfg.task.trials = 2;
        configs.push(cfg);
    }
    let mut predict = base_config();
    predict.reservoir.nodes = vec![20];
    predict.filters.counts = vec![1, 5];
    for cfg in &configs {
        let report = run_fitting(cfg).unwrap();
        for (r, ratio) in report.paired_ratios(1, |r| r.delta_test) {
            worst = worst.max((ratio - 1.0).abs());
            ranks_equal &= r.rank_lambda == r.rank_omega;
        }
    }
    let report = run_prediction(&predict).unwrap();
    for (r, ratio) in report.paired_ratios(1, |r| r.delta_test) {
        worst = worst.max((ratio - 1.0).abs());
        ranks_equal &= r.rank_lambda == r.rank_omega;
    }
    Outcome::new(
        worst <= 1e-12 && ranks_equal,
        format!("max relative Δ_tx difference {worst:.2e}, ranks equal: {ranks_equal}"),
    )
}

/// `(XᵀX + λI)⁻¹ Xᵀg` by Gaussian elimination with partial pivoting.
fn normal_equations(x: &DMatrix<f64>, g: &[f64], lambda: f64) -> Vec<f64> {
    let k = x.ncols();
    let mut a = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            a[i][j] = (0..x.nrows()).map(|r| x[(r, i)] * x[(r, j)]).sum::<f64>() + if i == j { lambda } else { 0.0 };
        }
        a[i][k] = (0..x.nrows()).map(|r| x[(r, i)] * g[r]).sum();
    }
    for col in 0..k {
        let p = (col..k).max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs())).unwrap();
        a.swap(col, p);
        for row in col + 1..k {
            let f = a[row][col] / a[col][col];
            for c in col..=k {
                a[row][c] -= f * a[col][c];
            }
        }
    }
    let mut c = vec![0.0; k];
    for row in (0..k).rev() {
        c[row] = (a[row][k] - (row + 1..k).map(|j| a[row][j] * c[j]).sum::<f64>()) / a[row][row];
    }
    c
}

fn c2_ridge_oracle() -> Outcome {
    let mut worst = 0.0_f64;
    for instance in 0..100u64 {
        let mut rng = rng_from_seed(1000 + instance);
        let x = DMatrix::from_column_slice(200, 20, &uniform_symmetric(&mut rng, 4000));
        let g = uniform_symmetric(&mut rng, 200);
        let sm = StateMatrix::from_nodes(x.clone()).unwrap();
        for lambda in [1e-6, 1e-2, 1.0] {
            let c = train_ridge(&sm, &g, Ridge::Fixed(lambda)).unwrap().coefficients;
            let o = normal_equations(&x, &g, lambda);
            let diff = c.iter().zip(&o).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            worst = worst.max(diff / o.iter().map(|v| v * v).sum::<f64>().sqrt());
        }
    }
    Outcome::new(worst <= 1e-8, format!("max relative deviation {worst:.2e} over 300 fits"))
}

fn c3_rank_oracle() -> Outcome {
    let mut failures = Vec::new();
    for i in 0..50u64 {
        let r = 1 + (i as usize % 20);
        let mut rng = rng_from_seed(5000 + i);
        let left = DMatrix::from_column_slice(1000, r, &uniform_symmetric(&mut rng, 1000 * r));
        let right = DMatrix::from_column_slice(r, 50, &uniform_symmetric(&mut rng, 50 * r));
        let got = covariance_rank(&StateMatrix::from_nodes(left * right).unwrap()).unwrap().rank;
        if got != r {
            failures.push((r, got));
        }
    }
    let v = uniform_symmetric(&mut rng_from_seed(77), 500);
    let x = DMatrix::from_fn(500, 3, |i, j| [v[i], 2.0 * v[i], 1.0][j]);
    let dup = covariance_rank(&StateMatrix::from_nodes(x).unwrap()).unwrap().rank;
    Outcome::new(
        failures.is_empty() && dup == 2,
        format!("{} of 50 constructed ranks wrong {failures:?}; [v|2v|1] → {dup}", failures.len()),
    )
}

fn c4_rank_amplification() -> Outcome {
    let mut cfg = base_config();
    cfg.reservoir.nodes = vec![10];
    cfg.filters.counts = vec![2, 3, 4, 5];
    cfg.task.trials = 10;
    let report = run_fitting(&cfg).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for n in 2..=5 {
        let per_seed: Vec<f64> = report
            .records
            .iter()
            .filter(|r| r.n_filters == n)
            .filter_map(|r| Some(r.rank_lambda? as f64 / r.rank_omega? as f64))
            .collect();
        let m = mean(&per_seed);
        pass &= m >= 0.9 * n as f64;
        parts.push(format!("N_f={n}: {m:.3} (≥ {:.1})", 0.9 * n as f64));
    }
    Outcome::new(pass, format!("mean Γ(Λ)/Γ(Ω): {}", parts.join(", "))).with(&report)
}

fn c5_filter_benefit() -> Outcome {
    let mut cfg = base_config();
    cfg.reservoir.nodes = vec![10, 20, 50];
    cfg.task.trials = 20;
    let report = run_fitting(&cfg).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for m in [10, 20, 50] {
        let r = mean(&ratios(&report, m, 5, |r| r.delta_test));
        pass &= r < if m == 10 { 0.8 } else { 1.0 };
        parts.push(format!("M={m}: {r:.3}"));
    }
    Outcome::new(pass, format!("mean Δ_tx(Λ)/Δ_tx(Ω): {}", parts.join(", "))).with(&report)
}

fn c6_sweep() -> Outcome {
    let mut cfg = base_config();
    cfg.reservoir.nodes = vec![80];
    cfg.filters.counts = vec![];
    cfg.sweep.alphas = linspace(0.05, 1.0, 10);
    cfg.sweep.sigmas = linspace(0.1, 3.0, 10);
    cfg.sweep.trials = 5;
    cfg.task.jobs = 8;
    let report = run_sweep(&cfg).unwrap();
    let summary = report.summary();
    let cell = |a: f64, s: f64| {
        let ia = cfg.sweep.alphas.iter().position(|v| *v == a).unwrap();
        let is = cfg.sweep.sigmas.iter().position(|v| *v == s).unwrap();
        (ia, is)
    };
    let best = summary
        .iter()
        .filter(|s| s.delta_test.mean.is_some())
        .min_by(|a, b| a.delta_test.mean.unwrap().total_cmp(&b.delta_test.mean.unwrap()))
        .unwrap();
    let (ba, bs) = cell(best.alpha.unwrap(), best.sigma.unwrap());
    let nearest = |grid: &[f64], v: f64| {
        (0..grid.len()).min_by(|&i, &j| (grid[i] - v).abs().total_cmp(&(grid[j] - v).abs())).unwrap()
    };
    let (ta, ts) = (nearest(&cfg.sweep.alphas, 0.8), nearest(&cfg.sweep.sigmas, 0.5));
    let near = ba.abs_diff(ta) <= 1 && bs.abs_diff(ts) <= 1;
    let alpha_one: Vec<f64> =
        summary.iter().filter(|s| s.alpha == Some(1.0)).map(|s| s.delta_test.mean.unwrap_or(f64::NAN)).collect();
    let min_alpha_one = alpha_one.iter().copied().fold(f64::INFINITY, f64::min);
    Outcome::new(
        near && min_alpha_one > 0.9,
        format!(
            "minimum mean Δ_tx {:.4} at (α={:.3}, σ={:.3}), target cell (α={:.3}, σ={:.3}); α=1 column min mean Δ_tx {min_alpha_one:.4}",
            best.delta_test.mean.unwrap(),
            best.alpha.unwrap(),
            best.sigma.unwrap(),
            cfg.sweep.alphas[ta],
            cfg.sweep.sigmas[ts],
        ),
    )
    .with(&report)
}

fn c7_prediction() -> Outcome {
    let mut cfg = base_config();
    cfg.reservoir.nodes = vec![30];
    cfg.task.horizon = 13;
    cfg.task.trials = 20;
    let report = run_prediction(&cfg).unwrap();
    let r = mean(&ratios(&report, 30, 5, |r| r.delta_test));
    let (p0, p5) = (mean(&delta_test(&report, 30, 0)), mean(&delta_test(&report, 30, 5)));
    Outcome::new(r < 1.0, format!("mean Δ_P(5)/Δ_P(0) = {r:.3} (Δ_P: {p0:.4} → {p5:.4})")).with(&report)
}

fn c8_laser() -> Outcome {
    let mut cfg = base_config();
    cfg.reservoir.kind = NodeType::Laser;
    cfg.reservoir.nodes = vec![10, 20, 50, 100];
    cfg.filters.counts = vec![];
    cfg.task.trials = 10;
    let report = run_fitting(&cfg).unwrap();
    let d: BTreeMap<usize, Vec<f64>> = [10, 20, 50, 100].into_iter().map(|m| (m, delta_test(&report, m, 0))).collect();
    let m = |k: usize| mean(&d[&k]);
    let pooled = ((std(&d[&50]).powi(2) + std(&d[&100]).powi(2)) / 2.0).sqrt();
    let decreasing = m(10) >= m(20);
    let flat = (m(100) - m(50)).abs() <= pooled;
    Outcome::new(
        decreasing && flat,
        format!(
            "mean Δ_tx: M=10 {:.4}, M=20 {:.4}, M=50 {:.4}, M=100 {:.4}; |Δ(100)−Δ(50)| = {:.4} vs pooled sd {pooled:.4}",
            m(10),
            m(20),
            m(50),
            m(100),
            (m(100) - m(50)).abs()
        ),
    )
    .with(&report)
}

fn c9_speedup() -> Outcome {
    let s = update_time_model(20, 7.5e-8, 5).speedup_vs(100);
    let two_sig = format!("{:.1}", s);
    Outcome::new(two_sig == "1.4", format!("speedup {s:.4}"))
}

fn c10_classification() -> Outcome {
    let mut cfg = base_config();
    cfg.reservoir.nodes = vec![4, 8, 16];
    cfg.filters.counts = vec![5];
    let reports = run_classification(&cfg).unwrap();
    let pe = |m: usize, n: usize| reports.iter().find(|r| r.nodes == m && r.n_filters == n).unwrap().pe;
    let small = pe(4, 5) < pe(4, 0);
    let gaps: Vec<f64> = [8, 16].iter().map(|&m| (pe(m, 5) - pe(m, 0)).abs()).collect();
    let pass = small && gaps.iter().all(|g| *g < 0.05);
    let report = classification_records(&reports, &cfg);
    let mut out = Outcome::new(
        pass,
        format!(
            "P_E M=4: {:.4} → {:.4}; M=8: {:.4} → {:.4}; M=16: {:.4} → {:.4} (N_f 0 → 5)",
            pe(4, 0),
            pe(4, 5),
            pe(8, 0),
            pe(8, 5),
            pe(16, 0),
            pe(16, 5)
        ),
    )
    .with(&report);
    for r in &reports {
        out.artifacts.push(format!("{:?}", r.confusion).into_bytes());
    }
    out
}

fn c11_memory() -> Outcome {
    let mut cfg = base_config();
    cfg.reservoir.nodes = vec![20];
    cfg.task.trials = 10;
    cfg.task.k_max = 50;
    let report = run_memory(&cfg).unwrap();
    let mc =
        |n: usize| -> Vec<f64> { report.records.iter().filter(|r| r.n_filters == n).filter_map(|r| r.mc).collect() };
    let (m0, m5) = (mean(&mc(0)), mean(&mc(5)));
    let per_seed_wins = mc(0).iter().zip(mc(5)).filter(|(a, b)| b > a).count();
    let bounded = report.curves.iter().all(|c| c.per_delay.iter().all(|v| (0.0..=1.0).contains(v)));
    let max0 = mc(0).iter().copied().fold(0.0, f64::max);
    Outcome::new(
        m5 > m0 && bounded && max0 <= 20.0,
        format!("mean MC: N_f=0 {m0:.3}, N_f=5 {m5:.3} (higher in {per_seed_wins}/10 seeds); max MC(N_f=0) {max0:.3}; MC_k in [0,1]: {bounded}"),
    )
    .with(&report)
}

type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn main() -> ExitCode {
    // `cargo test` passes harness flags such as `--nocapture`; none apply here.
    let only: Option<Vec<u32>> =
        std::env::var("ACCEPTANCE_ONLY").ok().map(|s| s.split(',').filter_map(|v| v.trim().parse().ok()).collect());
    let selected = |id: u32| only.as_ref().map_or(true, |o| o.contains(&id));
    let min = |m: u64| Duration::from_secs(60 * m);
    let criteria: [Criterion; 11] = [
        (1, "identity-filter equivalence", Duration::from_secs(10), c1_identity_filter),
        (2, "ridge normal-equation oracle", Duration::from_secs(5), c2_ridge_oracle),
        (3, "covariance rank oracle", Duration::from_secs(5), c3_rank_oracle),
        (4, "rank amplification", min(2), c4_rank_amplification),
        (5, "filter benefit on fitting", min(10), c5_filter_benefit),
        (6, "sweep landscape", min(30), c6_sweep),
        (7, "prediction", min(10), c7_prediction),
        (8, "laser model sanity", min(15), c8_laser),
        (9, "speedup formula", Duration::from_secs(1), c9_speedup),
        (10, "classification", min(30), c10_classification),
        (11, "memory capacity", min(5), c11_memory),
    ];
    let mut failed = 0;
    let mut first_run: BTreeMap<u32, Vec<Vec<u8>>> = BTreeMap::new();
    for (id, name, limit, f) in criteria {
        if !selected(id) {
            continue;
        }
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let pass = outcome.pass && elapsed <= limit;
        failed += usize::from(!pass);
        println!(
            "{} criterion {id:>2} ({name}): {} [{:.1} s, limit {} s]",
            if pass { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
        if (4..=11).contains(&id) && !outcome.artifacts.is_empty() {
            first_run.insert(id, outcome.artifacts);
        }
    }
    if selected(12) && !first_run.is_empty() {
        let start = Instant::now();
        let mut mismatched = Vec::new();
        for (id, _, _, f) in criteria {
            if let Some(previous) = first_run.get(&id) {
                if f().artifacts != *previous {
                    mismatched.push(id);
                }
            }
        }
        let pass = mismatched.is_empty();
        failed += usize::from(!pass);
        println!(
            "{} criterion 12 (determinism): reran criteria {:?}, mismatched tables: {mismatched:?} [{:.1} s]",
            if pass { "PASS" } else { "FAIL" },
            first_run.keys().collect::<Vec<_>>(),
            start.elapsed().as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
