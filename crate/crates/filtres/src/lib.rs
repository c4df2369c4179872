//! Experiment harness for filtered reservoir computers: configuration,
//! parallel experiment runs, CSV/JSON output and plot-ready exports.

pub mod app;
pub mod config;
mod error;
pub mod experiments;
pub mod io;
pub mod manifest;
pub mod plotdata;

pub use config::{Config, Overrides};
pub use error::{Error, Result};
pub use experiments::{
    run_classification, run_fitting, run_memory, run_prediction, run_sweep, ClassificationReport, ExperimentReport,
    Record, Task,
};
pub use manifest::RunManifest;
pub use plotdata::{emit_plotdata, PlotKind};
