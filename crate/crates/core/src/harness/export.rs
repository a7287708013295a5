//! Result persistence: a JSON summary plus CSV tables.
//!
//! `stats.csv` has the fixed header `iteration,median,q25,q75`. Floats are
//! written in shortest round-trip decimal form, so re-reading yields the
//! identical values.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::ensemble::{EnsembleOutput, EnsembleStats, StatsRow};
use super::fit::PowerLawFit;
use crate::error::{Error, Result};

pub const SUMMARY_FILE: &str = "summary.json";
pub const STATS_FILE: &str = "stats.csv";
pub const TRACES_FILE: &str = "traces.csv";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub generator: String,
    pub config: ExperimentConfig,
    pub master_seed: u64,
    pub trial_seeds: Vec<u64>,
    pub total_shots: u64,
    pub recorded_points: usize,
    pub final_row: StatsRow,
    pub fit: Option<PowerLawFit>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExportedFiles {
    pub summary: PathBuf,
    pub stats: PathBuf,
    pub traces: PathBuf,
}

#[derive(Serialize, Deserialize)]
struct TraceRow {
    trial: usize,
    iteration: u64,
    shots: u64,
    infidelity: f64,
}

pub fn summarize(output: &EnsembleOutput, fit: Option<&PowerLawFit>) -> Result<Summary> {
    let final_row = *output
        .stats
        .last()
        .ok_or_else(|| Error::Config("ensemble produced no recorded iterations".into()))?;
    Ok(Summary {
        generator: format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")),
        config: output.config.clone(),
        master_seed: output.config.master_seed,
        trial_seeds: output.trials.iter().map(|t| t.seed).collect(),
        total_shots: output.config.total_shots(),
        recorded_points: output.stats.len(),
        final_row,
        fit: fit.copied(),
    })
}

/// Writes `summary.json`, `stats.csv` and `traces.csv` into `dir`.
pub fn export_results(output: &EnsembleOutput, fit: Option<&PowerLawFit>, dir: &Path) -> Result<ExportedFiles> {
    if output.trials.is_empty() || output.trials.iter().any(|t| t.records.is_empty()) {
        return Err(Error::Config("refusing to export empty traces".into()));
    }
    let summary = summarize(output, fit)?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let files = ExportedFiles {
        summary: dir.join(SUMMARY_FILE),
        stats: dir.join(STATS_FILE),
        traces: dir.join(TRACES_FILE),
    };
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    fs::write(&files.summary, json + "\n").map_err(|e| Error::io(&files.summary, e))?;
    write_stats_csv(&output.stats, &files.stats)?;

    let mut w = csv::Writer::from_path(&files.traces).map_err(|e| csv_error(&files.traces, e))?;
    for t in &output.trials {
        for r in &t.records {
            w.serialize(TraceRow {
                trial: t.trial,
                iteration: r.iteration,
                shots: r.shots,
                infidelity: r.infidelity,
            })
            .map_err(|e| csv_error(&files.traces, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(&files.traces, e))?;
    Ok(files)
}

pub fn write_stats_csv(stats: &EnsembleStats, path: &Path) -> Result<()> {
    if stats.is_empty() {
        return Err(Error::Config("refusing to export empty statistics".into()));
    }
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    for row in &stats.rows {
        w.serialize(row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_stats_csv(path: &Path) -> Result<EnsembleStats> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header = r.headers().map_err(|e| csv_error(path, e))?;
    if header != vec!["iteration", "median", "q25", "q75"] {
        return Err(Error::Parse {
            path: path.into(),
            msg: format!("unexpected header {header:?}"),
        });
    }
    let rows = r
        .deserialize()
        .collect::<std::result::Result<Vec<StatsRow>, _>>()
        .map_err(|e| csv_error(path, e))?;
    Ok(EnsembleStats { rows })
}

pub fn read_summary(path: &Path) -> Result<Summary> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.into(),
        msg: e.to_string(),
    })
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    if e.is_io_error() {
        if let csv::ErrorKind::Io(io) = e.into_kind() {
            return Error::io(path, io);
        }
        unreachable!("is_io_error implies Io kind");
    }
    Error::Parse {
        path: path.into(),
        msg: e.to_string(),
    }
}
