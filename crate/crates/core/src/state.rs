//! Recorded node signals, one row per input time step.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::DMatrix;

use crate::{Error, Result};

/// Source of one state-matrix column. Node indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ColumnLabel {
    Node(usize),
    Filtered { node: usize, order: usize },
    Bias,
}

impl fmt::Display for ColumnLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnLabel::Node(i) => write!(f, "node_{i}"),
            ColumnLabel::Filtered { node, order } => write!(f, "node_{node}_f{order}"),
            ColumnLabel::Bias => f.write_str("bias"),
        }
    }
}

impl core::str::FromStr for ColumnLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::param("column label", format!("cannot parse `{s}`"));
        if s == "bias" {
            return Ok(ColumnLabel::Bias);
        }
        let rest = s.strip_prefix("node_").ok_or_else(bad)?;
        match rest.split_once("_f") {
            Some((node, order)) => Ok(ColumnLabel::Filtered {
                node: node.parse().map_err(|_| bad())?,
                order: order.parse().map_err(|_| bad())?,
            }),
            None => Ok(ColumnLabel::Node(rest.parse().map_err(|_| bad())?)),
        }
    }
}

/// An `N × K` column-major matrix of node (or filtered node) signals.
///
/// The first `startup_rows` rows are filter warm-up samples computed against
/// zero-padded history; fitting routines skip them.
#[derive(Debug, Clone, PartialEq)]
pub struct StateMatrix {
    data: DMatrix<f64>,
    labels: Vec<ColumnLabel>,
    node_count: usize,
    startup_rows: usize,
}

impl StateMatrix {
    /// Wraps raw node states (no bias), labelling columns `node_1 .. node_M`.
    pub fn from_nodes(data: DMatrix<f64>) -> Result<Self> {
        let m = data.ncols();
        let labels = (1..=m).map(ColumnLabel::Node).collect();
        Self::with_labels(data, labels, 0)
    }

    pub fn with_labels(data: DMatrix<f64>, labels: Vec<ColumnLabel>, startup_rows: usize) -> Result<Self> {
        if labels.len() != data.ncols() {
            return Err(Error::DimensionMismatch { expected: data.ncols(), found: labels.len() });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Divergence { step: pos % data.nrows().max(1) });
        }
        let bias_cols: Vec<usize> =
            labels.iter().enumerate().filter(|(_, l)| **l == ColumnLabel::Bias).map(|(i, _)| i).collect();
        match bias_cols.as_slice() {
            [] => {}
            [i] if *i + 1 == labels.len() => {
                if data.column(*i).iter().any(|&v| v != 1.0) {
                    return Err(Error::param("bias", "bias column must be exactly 1"));
                }
            }
            _ => return Err(Error::param("bias", "only a single trailing bias column is allowed")),
        }
        let node_count = labels
            .iter()
            .map(|l| match l {
                ColumnLabel::Node(i) | ColumnLabel::Filtered { node: i, .. } => *i,
                ColumnLabel::Bias => 0,
            })
            .max()
            .unwrap_or(0);
        let startup_rows = startup_rows.min(data.nrows());
        Ok(StateMatrix { data, labels, node_count, startup_rows })
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_data(self) -> DMatrix<f64> {
        self.data
    }

    pub fn labels(&self) -> &[ColumnLabel] {
        &self.labels
    }

    pub fn label_strings(&self) -> Vec<String> {
        self.labels.iter().map(|l| format!("{l}")).collect()
    }

    pub fn nrows(&self) -> usize {
        self.data.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.data.ncols()
    }

    /// Number of distinct reservoir nodes the columns derive from.
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn has_bias(&self) -> bool {
        self.labels.last() == Some(&ColumnLabel::Bias)
    }

    pub fn startup_rows(&self) -> usize {
        self.startup_rows
    }

    /// Rows usable for fitting (those after the startup block).
    pub fn fitting_rows(&self) -> usize {
        self.nrows() - self.startup_rows
    }

    pub fn is_filtered(&self) -> bool {
        self.labels.iter().any(|l| matches!(l, ColumnLabel::Filtered { .. }))
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.data.column(j).iter().copied().collect()
    }

    /// Drops the first `k` rows; startup flags shrink accordingly.
    pub fn skip_rows(&self, k: usize) -> StateMatrix {
        let k = k.min(self.nrows());
        StateMatrix {
            data: self.data.rows(k, self.nrows() - k).into_owned(),
            labels: self.labels.clone(),
            node_count: self.node_count,
            startup_rows: self.startup_rows.saturating_sub(k),
        }
    }

    /// Rows `start .. start + len`.
    pub fn row_range(&self, start: usize, len: usize) -> StateMatrix {
        StateMatrix {
            data: self.data.rows(start, len).into_owned(),
            labels: self.labels.clone(),
            node_count: self.node_count,
            startup_rows: self.startup_rows.saturating_sub(start).min(len),
        }
    }

    /// Owned copy of the fitting window (startup rows removed).
    pub fn fitting_block(&self) -> DMatrix<f64> {
        self.data.rows(self.startup_rows, self.fitting_rows()).into_owned()
    }

    pub(crate) fn from_parts(
        data: DMatrix<f64>,
        labels: Vec<ColumnLabel>,
        node_count: usize,
        startup_rows: usize,
    ) -> Self {
        StateMatrix { data, labels, node_count, startup_rows }
    }
}
