//! CSV and JSON output of experiment tables.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{CostRow, CostTable, ExperimentPlan, Failure, TraceRow};
use crate::analytics::BlindSearchModel;
use crate::error::{Error, Result};
use crate::landscape::{Family, LandscapeSpec};
use crate::rng;

pub const RESULTS_FILE: &str = "results.csv";
pub const TRACE_FILE: &str = "trace.csv";
pub const RUNS_FILE: &str = "runs.csv";
pub const METADATA_FILE: &str = "metadata.json";
pub const BASELINE_FILE: &str = "baseline.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub spec: LandscapeSpec,
    pub plan: ExperimentPlan,
    pub landscape_seeds: Vec<u64>,
    pub code_version: String,
    pub generator_id: u32,
    pub generator: String,
    pub failures: Vec<Failure>,
    pub warnings: Vec<String>,
}

/// Closed-form blind-search expectation for one population size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineRow {
    pub family: Family,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub p: f64,
    pub mean_tstar: f64,
    pub mean_cost: f64,
}

#[derive(Serialize)]
struct RunRow {
    algorithm: crate::search::Algorithm,
    m: usize,
    u: f64,
    landscape: usize,
    run: usize,
    /// Empty when the run never found the global maximum.
    t_star: Option<u64>,
}

fn write_csv<T: Serialize>(rows: impl IntoIterator<Item = T>, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    r.deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| Error::csv(path, e))
}

pub fn write_results(rows: &[CostRow], path: &Path) -> Result<()> {
    write_csv(rows, path)
}

pub fn write_trace(rows: &[TraceRow], path: &Path) -> Result<()> {
    write_csv(rows, path)
}

pub fn write_baseline(rows: &[BaselineRow], path: &Path) -> Result<()> {
    write_csv(rows, path)
}

/// Read a results file written by [`write_results`].
pub fn import_results(path: &Path) -> Result<Vec<CostRow>> {
    read_csv(path)
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRow>> {
    read_csv(path)
}

pub fn bs_baseline(spec: &LandscapeSpec, ms: &[usize]) -> Result<Vec<BaselineRow>> {
    ms.iter()
        .map(|&m| {
            let model = BlindSearchModel::for_spec(spec, m)?;
            Ok(BaselineRow {
                family: spec.family,
                n: spec.n,
                k: spec.k,
                m,
                p: model.p,
                mean_tstar: model.mean_halting_time(),
                mean_cost: model.mean_cost(spec.n),
            })
        })
        .collect()
}

/// Write `results.csv`, `trace.csv` and `metadata.json` (plus `runs.csv` with
/// every run's `t*` when `include_runs` is set) into `dir`, creating it if
/// needed. Returns the paths written.
pub fn export_results(table: &CostTable, dir: &Path, include_runs: bool) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();

    let path = dir.join(RESULTS_FILE);
    write_results(&table.rows, &path)?;
    written.push(path);

    let path = dir.join(TRACE_FILE);
    write_trace(&table.traces, &path)?;
    written.push(path);

    if include_runs {
        let path = dir.join(RUNS_FILE);
        let rows = table.runs.iter().flat_map(|cr| {
            cr.t_stars.iter().enumerate().flat_map(move |(landscape, ts)| {
                ts.iter().enumerate().map(move |(run, &t_star)| RunRow {
                    algorithm: cr.config.algorithm,
                    m: cr.config.m,
                    u: cr.config.u,
                    landscape,
                    run,
                    t_star,
                })
            })
        });
        write_csv(rows, &path)?;
        written.push(path);
    }

    let meta = Metadata {
        spec: table.spec,
        plan: table.plan.clone(),
        landscape_seeds: table.landscape_seeds.clone(),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        generator_id: rng::GENERATOR_ID,
        generator: rng::GENERATOR_NAME.to_string(),
        failures: table.failures.clone(),
        warnings: table.warnings.clone(),
    };
    let path = dir.join(METADATA_FILE);
    let json = serde_json::to_string_pretty(&meta).map_err(|e| Error::Malformed {
        path: path.clone(),
        message: e.to_string(),
    })?;
    fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
    written.push(path);

    Ok(written)
}
