//! Command-line interface.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use filtres_core::{bessel_bank, covariance_rank};

use crate::config::{Config, Overrides, SEED_ENV};
use crate::experiments::{self, classification_records, system_labels, ExperimentReport};
use crate::io;
use crate::manifest::RunManifest;
use crate::plotdata::{emit_plotdata, PlotKind};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "filtres", version, about = "Reservoir computers with FIR filter banks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit Lorenz z from Lorenz x.
    Fit(RunArgs),
    /// Predict Lorenz x `task.horizon` steps ahead.
    Predict(RunArgs),
    /// Classify the 19 Sprott systems from readout coefficients.
    Classify(RunArgs),
    /// α×σ grid of fitting (or prediction) error.
    Sweep(RunArgs),
    /// Memory capacity under uniform noise.
    Memory(RunArgs),
    /// Covariance rank and singular values of a saved state matrix.
    Rank {
        #[arg(long)]
        input: PathBuf,
    },
    /// Print the Bessel FIR coefficients of one order.
    Filters {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=5))]
        order: u64,
    },
}

#[derive(Debug, Args, Default)]
pub struct RunArgs {
    /// TOML configuration; defaults are used for anything it omits.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Reservoir sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub nodes: Option<Vec<usize>>,
    /// Filter bank sizes, comma separated (0 is always included).
    #[arg(long, value_delimiter = ',')]
    pub filters: Option<Vec<usize>>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl RunArgs {
    /// File, then `FILTRES_SEED`, then flags.
    pub fn resolve(&self) -> Result<Config> {
        let base = match &self.config {
            Some(path) => Config::load(path)?,
            None => Config::default(),
        };
        let env = std::env::var(SEED_ENV).ok();
        let overrides = Overrides {
            nodes: self.nodes.clone(),
            filters: self.filters.clone(),
            seed: self.seed,
            jobs: self.jobs,
            out: self.out.clone(),
        };
        base.resolve(env.as_deref(), &overrides)
    }
}

/// Files written by one experiment command.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub manifest: PathBuf,
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    let print = |out: &mut dyn Write, s: String| writeln!(out, "{s}").map_err(|e| Error::io("stdout", e));
    match cli.command {
        Command::Rank { input } => {
            let states = io::read_state_matrix(&input)?;
            let report = covariance_rank(&states)?;
            print(stdout, format!("rank {}", report.rank))?;
            print(stdout, format!("tolerance {}", io::fmt_f64(report.tolerance)))?;
            print(stdout, "singular_values".into())?;
            for s in &report.singular_values {
                print(stdout, io::fmt_f64(*s))?;
            }
        }
        Command::Filters { order } => {
            let bank = bessel_bank(order as usize)?;
            let coeffs = bank.filters().last().expect("nonempty bank");
            let text: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
            print(stdout, format!("order {order}: {}", text.join(" ")))?;
        }
        Command::Fit(args) => report_paths(stdout, run_experiment("fit", &args.resolve()?)?)?,
        Command::Predict(args) => report_paths(stdout, run_experiment("predict", &args.resolve()?)?)?,
        Command::Classify(args) => report_paths(stdout, run_experiment("classify", &args.resolve()?)?)?,
        Command::Sweep(args) => report_paths(stdout, run_experiment("sweep", &args.resolve()?)?)?,
        Command::Memory(args) => report_paths(stdout, run_experiment("memory", &args.resolve()?)?)?,
    }
    Ok(())
}

fn report_paths(stdout: &mut dyn Write, outcome: RunOutcome) -> Result<()> {
    for f in outcome.files.iter().chain([&outcome.manifest]) {
        writeln!(stdout, "wrote {}", outcome.dir.join(f).display()).map_err(|e| Error::io("stdout", e))?;
    }
    Ok(())
}

fn relative(dir: &Path, files: Vec<PathBuf>) -> Vec<PathBuf> {
    files.into_iter().map(|f| f.strip_prefix(dir).map(Path::to_path_buf).unwrap_or(f)).collect()
}

/// Runs one experiment family and writes its tables, plot data and
/// manifest under `config.output.dir`.
pub fn run_experiment(command: &str, config: &Config) -> Result<RunOutcome> {
    let started = chrono::Utc::now();
    let dir = config.output.dir.clone();
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut files = Vec::new();
    let tables = |report: &ExperimentReport, files: &mut Vec<PathBuf>| -> Result<()> {
        let results = dir.join(format!("{command}_results.csv"));
        io::write_results(report, &results)?;
        let summary = dir.join(format!("{command}_summary.csv"));
        io::write_summary(report, &summary)?;
        files.extend([results, summary]);
        Ok(())
    };
    match command {
        "fit" | "predict" => {
            let report =
                if command == "fit" { experiments::run_fitting(config)? } else { experiments::run_prediction(config)? };
            tables(&report, &mut files)?;
            files.extend(emit_plotdata(&report, PlotKind::ErrorVsM, &dir)?);
            files.extend(emit_plotdata(&report, PlotKind::ScatterRank, &dir)?);
            if report.records.iter().any(|r| r.n_filters > 0) {
                files.extend(emit_plotdata(&report, PlotKind::RatioGrid, &dir)?);
            }
        }
        "sweep" => {
            let report = experiments::run_sweep(config)?;
            tables(&report, &mut files)?;
            files.extend(emit_plotdata(&report, PlotKind::Heatmap, &dir)?);
        }
        "memory" => {
            let report = experiments::run_memory(config)?;
            tables(&report, &mut files)?;
            let curves = dir.join("memory_curves.csv");
            io::write_memory_curves(&report.curves, &curves)?;
            files.push(curves);
        }
        "classify" => {
            let reports = experiments::run_classification(config)?;
            tables(&classification_records(&reports, config), &mut files)?;
            files.extend(emit_plotdata(reports.as_slice(), PlotKind::Confusion, &dir)?);
            let labels = system_labels();
            for r in &reports {
                let p = dir.join(format!(
                    "library_{}_M{}_Nf{}_seed{}.csv",
                    r.node_type.as_str(),
                    r.nodes,
                    r.n_filters,
                    r.seed
                ));
                io::write_library(r, &labels, &p)?;
                files.push(p);
            }
        }
        other => return Err(Error::config("command", format!("unknown experiment {other:?}"))),
    }
    let files = relative(&dir, files);
    let mut manifest = RunManifest::new(command, config, started);
    manifest.finish(&dir, &files)?;
    let manifest = manifest.write(&dir)?;
    Ok(RunOutcome { dir: dir.clone(), files, manifest: relative(&dir, vec![manifest]).remove(0) })
}
