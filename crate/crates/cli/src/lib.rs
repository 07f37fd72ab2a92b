//! Batch front end for the `qpdno` solvers: experiment configs,
//! convergence studies, result tables and coefficient archives.

pub mod archive;
pub mod config;
pub mod study;

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use thiserror::Error;

use crate::config::{Experiment, ExperimentConfig, ValidationError};
use crate::study::{run_convergence_study, write_csv, ExpansionNote, StudyReport};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("i/o error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration:\n{}", .0.iter().map(|e| format!("  {e}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<ValidationError>),
    #[error(transparent)]
    Numeric(#[from] qpdno::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub const RESULTS_FILE: &str = "results.csv";
pub const METADATA_FILE: &str = "metadata.json";

/// Sidecar with everything that may differ between otherwise identical runs.
#[derive(Debug, Serialize)]
pub struct Metadata<'a> {
    pub library: &'static str,
    pub version: &'static str,
    pub config: &'a ExperimentConfig,
    pub started_unix_seconds: u64,
    pub runtime_seconds: f64,
    pub threads: usize,
    pub rows: usize,
    pub warnings: &'a [String],
    pub expansions: &'a [ExpansionNote],
}

/// Validates a parsed config, turning the error list into a [`CliError`].
pub fn validate(config: &ExperimentConfig) -> Result<Experiment, CliError> {
    config.validate().map_err(CliError::Invalid)
}

/// Runs the study and writes `results.csv` and `metadata.json` to `out`.
pub fn run_to_dir(exp: &Experiment, out: &Path) -> Result<(StudyReport, PathBuf), CliError> {
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let clock = Instant::now();
    let report = run_convergence_study(exp)?;
    let runtime = clock.elapsed().as_secs_f64();

    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let csv_path = out.join(RESULTS_FILE);
    let file = std::fs::File::create(&csv_path).map_err(|e| CliError::Io(format!("{}: {e}", csv_path.display())))?;
    write_csv(&report.rows, std::io::BufWriter::new(file))?;

    let meta = Metadata {
        library: "qpdno",
        version: env!("CARGO_PKG_VERSION"),
        config: &exp.config,
        started_unix_seconds: started,
        runtime_seconds: runtime,
        threads: rayon::current_num_threads(),
        rows: report.rows.len(),
        warnings: &exp.warnings,
        expansions: &report.notes,
    };
    let json = serde_json::to_string_pretty(&meta).map_err(|e| CliError::Io(e.to_string()))?;
    std::fs::write(out.join(METADATA_FILE), json + "\n")?;
    Ok((report, csv_path))
}
