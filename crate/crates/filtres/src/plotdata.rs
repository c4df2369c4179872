//! Tidy CSV exports shaped for the usual figure families.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::experiments::{system_labels, ClassificationReport, ExperimentReport, Record, Stat};
use crate::io::{fmt_f64, write_confusion};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotKind {
    /// Mean and median testing error per (M, N_f).
    ErrorVsM,
    /// Within-seed ratios against the reservoir-only baseline per (M, N_f).
    RatioGrid,
    /// Mean testing error per α×σ cell.
    Heatmap,
    /// Testing error paired with covariance rank, one row per record.
    ScatterRank,
    /// Testing error paired with memory capacity, one row per record.
    ScatterMemory,
    /// One confusion matrix per classification run.
    Confusion,
}

impl PlotKind {
    pub const ALL: [PlotKind; 6] = [
        PlotKind::ErrorVsM,
        PlotKind::RatioGrid,
        PlotKind::Heatmap,
        PlotKind::ScatterRank,
        PlotKind::ScatterMemory,
        PlotKind::Confusion,
    ];

    pub fn file_stem(self) -> &'static str {
        match self {
            PlotKind::ErrorVsM => "error_vs_m",
            PlotKind::RatioGrid => "ratio_grid",
            PlotKind::Heatmap => "heatmap",
            PlotKind::ScatterRank => "scatter_rank",
            PlotKind::ScatterMemory => "scatter_memory",
            PlotKind::Confusion => "confusion",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum PlotInput<'a> {
    Report(&'a ExperimentReport),
    Classification(&'a [ClassificationReport]),
}

impl<'a> From<&'a ExperimentReport> for PlotInput<'a> {
    fn from(r: &'a ExperimentReport) -> Self {
        PlotInput::Report(r)
    }
}

impl<'a> From<&'a [ClassificationReport]> for PlotInput<'a> {
    fn from(r: &'a [ClassificationReport]) -> Self {
        PlotInput::Classification(r)
    }
}

fn require(report: &ExperimentReport, column: &str, present: fn(&Record) -> bool) -> Result<()> {
    if report.records.iter().any(present) {
        Ok(())
    } else {
        Err(Error::ReportShape(column.to_owned()))
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn table(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes the export for `kind` under `dir` and returns the files written.
pub fn emit_plotdata<'a>(input: impl Into<PlotInput<'a>>, kind: PlotKind, dir: &Path) -> Result<Vec<PathBuf>> {
    let path = dir.join(format!("{}.csv", kind.file_stem()));
    match (input.into(), kind) {
        (PlotInput::Classification(reports), PlotKind::Confusion) => {
            if reports.is_empty() {
                return Err(Error::ReportShape("confusion".into()));
            }
            let labels = system_labels();
            let mut files = Vec::new();
            for r in reports {
                let p = dir.join(format!(
                    "confusion_{}_M{}_Nf{}_seed{}.csv",
                    r.node_type.as_str(),
                    r.nodes,
                    r.n_filters,
                    r.seed
                ));
                write_confusion(&r.confusion, &labels, &p)?;
                files.push(p);
            }
            Ok(files)
        }
        (PlotInput::Classification(_), _) => Err(Error::ReportShape("delta_test".into())),
        (PlotInput::Report(_), PlotKind::Confusion) => Err(Error::ReportShape("confusion".into())),
        (PlotInput::Report(report), kind) => {
            match kind {
                PlotKind::ErrorVsM => error_vs_m(report, &path)?,
                PlotKind::RatioGrid => ratio_grid(report, &path)?,
                PlotKind::Heatmap => heatmap(report, &path)?,
                PlotKind::ScatterRank => scatter_rank(report, &path)?,
                PlotKind::ScatterMemory => scatter_memory(report, &path)?,
                PlotKind::Confusion => unreachable!(),
            }
            Ok(vec![path])
        }
    }
}

fn error_vs_m(report: &ExperimentReport, path: &Path) -> Result<()> {
    require(report, "delta_test", |r| r.delta_test.is_some())?;
    let rows = report.summary().into_iter().map(|s| {
        vec![
            s.node_type.as_str().to_owned(),
            s.nodes.to_string(),
            s.n_filters.to_string(),
            s.trials.to_string(),
            s.diverged.to_string(),
            opt(s.delta_test.mean),
            opt(s.delta_test.median),
            opt(s.delta_train.mean),
            opt(s.rank_omega.mean),
            opt(s.rank_lambda.mean),
        ]
    });
    let header = [
        "node_type",
        "M",
        "N_f",
        "trials",
        "diverged",
        "mean_delta_test",
        "median_delta_test",
        "mean_delta_train",
        "mean_rank_omega",
        "mean_rank_lambda",
    ];
    table(path, &header, rows)
}

fn ratio_grid(report: &ExperimentReport, path: &Path) -> Result<()> {
    require(report, "delta_test", |r| r.delta_test.is_some())?;
    require(report, "rank_lambda", |r| r.rank_lambda.is_some())?;
    let mut keys: Vec<(usize, usize)> = Vec::new();
    for r in report.records.iter().filter(|r| r.n_filters > 0) {
        if !keys.contains(&(r.nodes, r.n_filters)) {
            keys.push((r.nodes, r.n_filters));
        }
    }
    let rows: Vec<Vec<String>> = keys
        .into_iter()
        .map(|(m, nf)| {
            let err: Vec<f64> = report
                .paired_ratios(nf, |r| r.delta_test)
                .into_iter()
                .filter(|(r, _)| r.nodes == m)
                .map(|(_, v)| v)
                .collect();
            let rank: Vec<f64> = report
                .records
                .iter()
                .filter(|r| r.nodes == m && r.n_filters == nf)
                .filter_map(|r| Some(r.rank_lambda? as f64 / r.rank_omega? as f64))
                .collect();
            vec![
                m.to_string(),
                nf.to_string(),
                err.len().to_string(),
                opt(Stat::of(err.iter().copied()).mean),
                opt(Stat::of(err.iter().copied()).median),
                opt(Stat::of(rank.iter().copied()).mean),
            ]
        })
        .collect();
    table(path, &["M", "N_f", "pairs", "mean_error_ratio", "median_error_ratio", "mean_rank_ratio"], rows)
}

fn heatmap(report: &ExperimentReport, path: &Path) -> Result<()> {
    require(report, "alpha", |r| r.alpha.is_some())?;
    require(report, "sigma", |r| r.sigma.is_some())?;
    require(report, "delta_test", |r| r.delta_test.is_some() || r.diverged)?;
    let rows = report.summary().into_iter().map(|s| {
        vec![
            s.nodes.to_string(),
            s.n_filters.to_string(),
            opt(s.alpha),
            opt(s.sigma),
            s.trials.to_string(),
            s.diverged.to_string(),
            opt(s.delta_test.mean),
            opt(s.delta_test.median),
        ]
    });
    table(path, &["M", "N_f", "alpha", "sigma", "trials", "diverged", "mean_delta_test", "median_delta_test"], rows)
}

fn scatter_rank(report: &ExperimentReport, path: &Path) -> Result<()> {
    require(report, "delta_test", |r| r.delta_test.is_some())?;
    require(report, "rank_omega", |r| r.rank_omega.is_some())?;
    let rows = report.records.iter().filter(|r| !r.diverged).map(|r| {
        let rank = if r.n_filters == 0 { r.rank_omega } else { r.rank_lambda };
        let dt = r.delta_test.unwrap_or(f64::NAN);
        vec![
            r.nodes.to_string(),
            r.n_filters.to_string(),
            r.seed.to_string(),
            fmt_f64(dt),
            rank.map(|v| v.to_string()).unwrap_or_default(),
            opt(rank.map(|g| dt / g as f64)),
        ]
    });
    table(path, &["M", "N_f", "seed", "delta_test", "rank", "delta_test_per_rank"], rows)
}

fn scatter_memory(report: &ExperimentReport, path: &Path) -> Result<()> {
    require(report, "delta_test", |r| r.delta_test.is_some())?;
    require(report, "mc", |r| r.mc.is_some())?;
    let rows =
        report.records.iter().filter(|r| r.delta_test.is_some() && r.mc.is_some()).map(|r| {
            vec![r.nodes.to_string(), r.n_filters.to_string(), r.seed.to_string(), opt(r.delta_test), opt(r.mc)]
        });
    table(path, &["M", "N_f", "seed", "delta_test", "mc"], rows)
}

/// Copies memory capacity from `memory` into the matching fitting records
/// (same node type, size, bank and seed), for the error-vs-capacity scatter.
pub fn join_memory(fitting: &ExperimentReport, memory: &ExperimentReport) -> ExperimentReport {
    let mut joined = fitting.clone();
    for r in &mut joined.records {
        r.mc = memory
            .records
            .iter()
            .find(|m| (m.node_type, m.nodes, m.n_filters, m.seed) == (r.node_type, r.nodes, r.n_filters, r.seed))
            .and_then(|m| m.mc);
    }
    joined
}
