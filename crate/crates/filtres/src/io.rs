//! File formats: result tables, confusion matrices, state matrices, readout
//! models and filter banks.
//!
//! Floats are written as `{:.16e}` (17 significant digits), which reads back
//! to the identical `f64`.

use std::fs;
use std::io::Write;
use std::path::Path;

use filtres_core::{ColumnLabel, FilterBank, FitSource, MultivariateSeries, ReadoutModel, StateMatrix};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::experiments::{ClassificationReport, ExperimentReport, MemoryCurve, Record};
use crate::{Error, Result};

pub const RESULT_COLUMNS: [&str; 13] = [
    "task",
    "node_type",
    "M",
    "N_f",
    "alpha",
    "sigma",
    "seed",
    "delta_train",
    "delta_test",
    "rank_omega",
    "rank_lambda",
    "mc",
    "pe",
];

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn opt_usize(v: Option<usize>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn record_row(r: &Record) -> [String; 13] {
    [
        r.task.as_str().to_owned(),
        r.node_type.as_str().to_owned(),
        r.nodes.to_string(),
        r.n_filters.to_string(),
        opt_f64(r.alpha),
        opt_f64(r.sigma),
        r.seed.to_string(),
        opt_f64(r.delta_train),
        opt_f64(r.delta_test),
        opt_usize(r.rank_omega),
        opt_usize(r.rank_lambda),
        opt_f64(r.mc),
        opt_f64(r.pe),
    ]
}

fn ensure_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => fs::create_dir_all(dir).map_err(|e| Error::io(dir, e)),
        _ => Ok(()),
    }
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    ensure_parent(path)?;
    Ok(csv::Writer::from_path(path)?)
}

/// Long-form results, one row per record. Failed trials keep their
/// condition columns and leave the metrics empty.
pub fn results_csv(report: &ExperimentReport) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RESULT_COLUMNS)?;
    for r in &report.records {
        w.write_record(record_row(r))?;
    }
    w.into_inner().map_err(|e| Error::io("results", e.into_error()))
}

pub fn write_results(report: &ExperimentReport, path: &Path) -> Result<()> {
    ensure_parent(path)?;
    fs::write(path, results_csv(report)?).map_err(|e| Error::io(path, e))
}

/// Per-condition means and medians.
pub fn write_summary(report: &ExperimentReport, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record([
        "task",
        "node_type",
        "M",
        "N_f",
        "alpha",
        "sigma",
        "trials",
        "diverged",
        "mean_delta_train",
        "median_delta_train",
        "mean_delta_test",
        "median_delta_test",
        "mean_rank_omega",
        "mean_rank_lambda",
        "mean_mc",
        "median_mc",
        "mean_pe",
        "median_pe",
    ])?;
    for s in report.summary() {
        w.write_record([
            report.task.as_str().to_owned(),
            s.node_type.as_str().to_owned(),
            s.nodes.to_string(),
            s.n_filters.to_string(),
            opt_f64(s.alpha),
            opt_f64(s.sigma),
            s.trials.to_string(),
            s.diverged.to_string(),
            opt_f64(s.delta_train.mean),
            opt_f64(s.delta_train.median),
            opt_f64(s.delta_test.mean),
            opt_f64(s.delta_test.median),
            opt_f64(s.rank_omega.mean),
            opt_f64(s.rank_lambda.mean),
            opt_f64(s.mc.mean),
            opt_f64(s.mc.median),
            opt_f64(s.pe.mean),
            opt_f64(s.pe.median),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_memory_curves(curves: &[MemoryCurve], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["M", "N_f", "seed", "k", "mc_k"])?;
    for c in curves {
        for (k, v) in c.per_delay.iter().enumerate() {
            w.write_record([
                c.nodes.to_string(),
                c.n_filters.to_string(),
                c.seed.to_string(),
                (k + 1).to_string(),
                fmt_f64(*v),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Square count matrix with `labels` along both axes (rows: true class).
pub fn write_confusion(confusion: &[Vec<usize>], labels: &[String], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(std::iter::once("system").chain(labels.iter().map(String::as_str)))?;
    for (label, row) in labels.iter().zip(confusion) {
        w.write_record(std::iter::once(label.clone()).chain(row.iter().map(|c| c.to_string())))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_confusion(path: &Path) -> Result<(Vec<String>, Vec<Vec<usize>>)> {
    let mut r = csv::Reader::from_path(path)?;
    let labels: Vec<String> = r.headers()?.iter().skip(1).map(str::to_owned).collect();
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .skip(1)
            .map(|v| {
                v.parse().map_err(|_| Error::Parse {
                    path: path.into(),
                    line: i + 2,
                    message: format!("bad count {v:?}"),
                })
            })
            .collect::<Result<Vec<usize>>>()?;
        rows.push(row);
    }
    Ok((labels, rows))
}

/// Reference library, one row of node coefficients per system.
pub fn write_library(report: &ClassificationReport, labels: &[String], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    let width = report.library.first().map_or(0, Vec::len);
    w.write_record(std::iter::once("system".to_owned()).chain((1..=width).map(|i| format!("c_{i}"))))?;
    for (label, row) in labels.iter().zip(&report.library) {
        w.write_record(std::iter::once(label.clone()).chain(row.iter().map(|v| fmt_f64(*v))))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Series with a leading time column `t = i·dt`.
pub fn write_series(series: &MultivariateSeries, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(std::iter::once("t").chain(series.names().iter().map(String::as_str)))?;
    for i in 0..series.len() {
        let t = i as f64 * series.dt();
        w.write_record(std::iter::once(fmt_f64(t)).chain((0..series.dim()).map(|c| fmt_f64(series.column(c)[i]))))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// One row per time step, columns named after the matrix labels
/// (`node_<i>`, `node_<i>_f<η>`, `bias`).
pub fn write_state_matrix(states: &StateMatrix, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(states.label_strings())?;
    for row in states.data().row_iter() {
        w.write_record(row.iter().map(|v| fmt_f64(*v)))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_state_matrix(path: &Path) -> Result<StateMatrix> {
    let mut r = csv::Reader::from_path(path)?;
    let labels = r
        .headers()?
        .iter()
        .map(|h| {
            h.parse::<ColumnLabel>().map_err(|_| Error::Parse {
                path: path.into(),
                line: 1,
                message: format!("unknown column {h:?}"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut values = Vec::new();
    let mut rows = 0;
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != labels.len() {
            return Err(Error::Parse {
                path: path.into(),
                line: i + 2,
                message: format!("expected {} fields", labels.len()),
            });
        }
        for v in rec.iter() {
            values.push(v.trim().parse::<f64>().map_err(|_| Error::Parse {
                path: path.into(),
                line: i + 2,
                message: format!("not a number: {v:?}"),
            })?);
        }
        rows += 1;
    }
    let data = DMatrix::from_row_slice(rows, labels.len(), &values);
    Ok(StateMatrix::with_labels(data, labels, 0)?)
}

fn source_name(s: FitSource) -> &'static str {
    match s {
        FitSource::ReservoirOnly => "reservoir_only",
        FitSource::Filtered => "filtered",
    }
}

/// Plain-text readout model: header lines `key value`, then one
/// `label coefficient` line per column.
pub fn model_to_string(model: &ReadoutModel) -> String {
    let mut s = String::new();
    s.push_str(&format!("source {}\n", source_name(model.source)));
    s.push_str(&format!("ridge_lambda {}\n", fmt_f64(model.ridge_lambda)));
    s.push_str(&format!("training_error {}\n", fmt_f64(model.training_error)));
    s.push_str(&format!("rank_deficient {}\n", model.rank_deficient));
    s.push_str(&format!("columns {}\n", model.coefficients.len()));
    for (label, c) in model.labels.iter().zip(&model.coefficients) {
        s.push_str(&format!("{label} {}\n", fmt_f64(*c)));
    }
    s
}

pub fn model_from_str(text: &str, path: &Path) -> Result<ReadoutModel> {
    let err = |line: usize, message: String| Error::Parse { path: path.into(), line, message };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let mut field = |key: &str| -> Result<(usize, String)> {
        let (i, line) = lines.next().ok_or_else(|| err(0, format!("missing `{key}`")))?;
        match line.split_once(' ') {
            Some((k, v)) if k == key => Ok((i + 1, v.trim().to_owned())),
            _ => Err(err(i + 1, format!("expected `{key}`"))),
        }
    };
    let (l, source) = field("source")?;
    let source = match source.as_str() {
        "reservoir_only" => FitSource::ReservoirOnly,
        "filtered" => FitSource::Filtered,
        other => return Err(err(l, format!("unknown source {other:?}"))),
    };
    let num = |(l, v): (usize, String)| v.parse::<f64>().map_err(|_| err(l, format!("not a number: {v:?}")));
    let ridge_lambda = num(field("ridge_lambda")?)?;
    let training_error = num(field("training_error")?)?;
    let (l, rd) = field("rank_deficient")?;
    let rank_deficient = rd.parse().map_err(|_| err(l, format!("not a boolean: {rd:?}")))?;
    let (l, n) = field("columns")?;
    let n: usize = n.parse().map_err(|_| err(l, format!("not a count: {n:?}")))?;
    let mut labels = Vec::with_capacity(n);
    let mut coefficients = Vec::with_capacity(n);
    for (i, line) in lines.by_ref().take(n) {
        let (label, v) = line.split_once(' ').ok_or_else(|| err(i + 1, "expected `label value`".into()))?;
        labels.push(label.parse::<ColumnLabel>().map_err(|_| err(i + 1, format!("unknown column {label:?}")))?);
        coefficients.push(v.trim().parse::<f64>().map_err(|_| err(i + 1, format!("not a number: {v:?}")))?);
    }
    if coefficients.len() != n {
        return Err(err(0, format!("expected {n} coefficients, found {}", coefficients.len())));
    }
    Ok(ReadoutModel { coefficients, labels, ridge_lambda, training_error, source, rank_deficient })
}

pub fn write_model(model: &ReadoutModel, path: &Path) -> Result<()> {
    ensure_parent(path)?;
    fs::write(path, model_to_string(model)).map_err(|e| Error::io(path, e))
}

pub fn read_model(path: &Path) -> Result<ReadoutModel> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    model_from_str(&text, path)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BankFile {
    filter: Vec<FilterEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FilterEntry {
    order: usize,
    coefficients: Vec<f64>,
}

/// TOML listing of a bank:
///
/// ```toml
/// [[filter]]
/// order = 2
/// coefficients = [1.7321, 1.0]
/// ```
pub fn filter_bank_to_string(bank: &FilterBank) -> String {
    let file = BankFile {
        filter: bank.filters().iter().map(|c| FilterEntry { order: c.len(), coefficients: c.clone() }).collect(),
    };
    toml::to_string(&file).expect("bank is always serializable")
}

pub fn filter_bank_from_str(text: &str) -> Result<FilterBank> {
    let file: BankFile =
        toml::from_str(text).map_err(|e| Error::config("filters.bank_file", e.message().to_owned()))?;
    for f in &file.filter {
        if f.order != f.coefficients.len() {
            return Err(Error::config(
                "filters.bank_file",
                format!("filter of order {} lists {} coefficients", f.order, f.coefficients.len()),
            ));
        }
    }
    Ok(FilterBank::new(file.filter.into_iter().map(|f| f.coefficients).collect())?)
}

pub fn write_filter_bank(bank: &FilterBank, path: &Path) -> Result<()> {
    ensure_parent(path)?;
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(filter_bank_to_string(bank).as_bytes()).map_err(|e| Error::io(path, e))
}

pub fn read_filter_bank(path: &Path) -> Result<FilterBank> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    filter_bank_from_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use filtres_core::bessel_bank;

    #[test]
    fn bank_round_trip() {
        let bank = bessel_bank(5).unwrap();
        assert_eq!(filter_bank_from_str(&filter_bank_to_string(&bank)).unwrap(), bank);
    }

    #[test]
    fn bank_order_mismatch() {
        let text = "[[filter]]\norder = 2\ncoefficients = [1.0]\n";
        assert!(filter_bank_from_str(text).is_err());
    }

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, -1.0 / 3.0, 6.02214076e23, f64::MIN_POSITIVE, 1e-300] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }
}
