//! Parameter grids for the figure data sets.
//!
//! Each figure is a list of panels; a panel is one landscape ensemble plus the
//! configurations run on it. `Scale::Desk` trims the largest sizes and uses
//! smaller ensembles so that every figure runs on a laptop.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{
    build_ensemble, bs_baseline, export_results, load_ensemble, read_manifest, run_experiment, BaselineRow,
    ConfigPoint, CostRow, CostTable, Ensemble, ExperimentPlan, Failure, TraceRow,
};
use crate::analytics::{fit_scaling, log_log_slope, ScalingModel};
use crate::error::{Error, Result};
use crate::landscape::{IsingVariant, LandscapeSpec};
use crate::search::Algorithm;

/// Population sizes of the cost-versus-M figures (log-spaced, 2 to 1000).
pub const M_GRID: [usize; 9] = [2, 5, 10, 20, 50, 100, 200, 500, 1000];

/// Mean mutations per string of the cost-versus-uN figures.
pub const UN_GRID: [f64; 9] = [0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0];

const COOPERATIVE: [Algorithm; 3] = [Algorithm::Il, Algorithm::Aga, Algorithm::Sga];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FigureId {
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
    F7,
    A1,
    A2,
}

impl FigureId {
    pub const ALL: [FigureId; 9] = [
        FigureId::F1,
        FigureId::F2,
        FigureId::F3,
        FigureId::F4,
        FigureId::F5,
        FigureId::F6,
        FigureId::F7,
        FigureId::A1,
        FigureId::A2,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FigureId::F1 => "1",
            FigureId::F2 => "2",
            FigureId::F3 => "3",
            FigureId::F4 => "4",
            FigureId::F5 => "5",
            FigureId::F6 => "6",
            FigureId::F7 => "7",
            FigureId::A1 => "A1",
            FigureId::A2 => "A2",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|f| f.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::param(format!("unknown figure {s:?} (expected 1-7, A1 or A2)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Desk,
    Full,
}

impl FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Scale::Desk),
            "full" => Ok(Scale::Full),
            _ => Err(Error::param(format!("unknown scale {s:?} (expected desk or full)"))),
        }
    }
}

/// One ensemble and the configurations run on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub spec: LandscapeSpec,
    pub landscapes: usize,
    pub runs: usize,
    pub configs: Vec<ConfigPoint>,
    /// Population sizes for the closed-form blind-search rows.
    pub baseline_m: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureSpec {
    pub id: FigureId,
    pub scale: Scale,
    pub panels: Vec<Panel>,
    /// Scaling fits to compute from the mean halting times: (algorithm, model).
    pub fits: Vec<(Algorithm, ScalingModel)>,
}

struct Counts {
    landscapes: usize,
    runs: usize,
}

fn nk_counts(scale: Scale, n: usize) -> Counts {
    match (scale, n) {
        (Scale::Full, _) => Counts {
            landscapes: 100,
            runs: 1000,
        },
        (Scale::Desk, n) if n <= 12 => Counts {
            landscapes: 100,
            runs: 100,
        },
        (Scale::Desk, _) => Counts {
            landscapes: 20,
            runs: 50,
        },
    }
}

fn ising_runs(scale: Scale) -> usize {
    match scale {
        Scale::Desk => 200,
        Scale::Full => 1000,
    }
}

fn m_sweep(algorithms: &[Algorithm], u: f64) -> Vec<ConfigPoint> {
    algorithms
        .iter()
        .flat_map(|&a| M_GRID.iter().map(move |&m| ConfigPoint::new(a, m, u)))
        .collect()
}

fn un_sweep(n: usize, m: usize) -> Vec<ConfigPoint> {
    COOPERATIVE
        .iter()
        .flat_map(|&a| UN_GRID.iter().map(move |&un| ConfigPoint::new(a, m, un / n as f64)))
        .collect()
}

fn nk_panel(scale: Scale, n: usize, k: usize, configs: Vec<ConfigPoint>, baseline_m: Vec<usize>) -> Panel {
    let c = nk_counts(scale, n);
    Panel {
        spec: LandscapeSpec::nk(n, k),
        landscapes: c.landscapes,
        runs: c.runs,
        configs,
        baseline_m,
    }
}

fn trimmed(scale: Scale, ns: &[usize]) -> Vec<usize> {
    ns.iter()
        .copied()
        .filter(|&n| scale == Scale::Full || n <= 18)
        .collect()
}

/// The parameter grid of one figure.
pub fn figure_spec(id: FigureId, scale: Scale) -> FigureSpec {
    let mut fits = Vec::new();
    let panels = match id {
        FigureId::F1 => [0.001, 0.01, 0.1, 0.2]
            .iter()
            .map(|&u| nk_panel(scale, 12, 0, m_sweep(&COOPERATIVE, u), M_GRID.to_vec()))
            .collect(),
        FigureId::F2 => trimmed(scale, &[12, 15, 18, 21])
            .into_iter()
            .map(|n| nk_panel(scale, n, 0, un_sweep(n, 10), vec![10]))
            .collect(),
        FigureId::F3 => {
            fits = vec![
                (Algorithm::Il, ScalingModel::NLogN),
                (Algorithm::Aga, ScalingModel::Exponential),
                (Algorithm::Sga, ScalingModel::Exponential),
            ];
            let ns: Vec<usize> = match scale {
                Scale::Desk => vec![8, 10, 12, 14, 16, 18],
                Scale::Full => (8..=21).collect(),
            };
            ns.into_iter()
                .map(|n| {
                    let configs = COOPERATIVE
                        .iter()
                        .map(|&a| ConfigPoint::new(a, 100, 0.01 / n as f64))
                        .collect();
                    nk_panel(scale, n, 0, configs, vec![100])
                })
                .collect()
        }
        FigureId::F4 => [1, 3, 5, 9]
            .iter()
            .map(|&k| {
                nk_panel(
                    scale,
                    12,
                    k,
                    m_sweep(&[Algorithm::Il, Algorithm::Aga, Algorithm::Sga, Algorithm::Bs], 0.1),
                    M_GRID.to_vec(),
                )
            })
            .collect(),
        FigureId::F5 => [(12, 3), (15, 4), (18, 5), (21, 6)]
            .iter()
            .filter(|&&(n, _)| scale == Scale::Full || n <= 18)
            .map(|&(n, k)| nk_panel(scale, n, k, un_sweep(n, 10), vec![10]))
            .collect(),
        FigureId::F6 | FigureId::F7 => {
            let configs = [10, 200]
                .iter()
                .flat_map(|&m| {
                    [Algorithm::Il, Algorithm::Aga, Algorithm::Sga, Algorithm::Bs]
                        .into_iter()
                        .map(move |a| ConfigPoint::new(a, m, 0.1))
                })
                .collect();
            vec![nk_panel(scale, 12, 9, configs, vec![10, 200])]
        }
        FigureId::A1 => {
            fits = vec![(Algorithm::Il, ScalingModel::Linear), (Algorithm::Raw, ScalingModel::Linear)];
            let ns = match scale {
                Scale::Desk => vec![8, 10, 12, 14, 16, 18],
                Scale::Full => vec![8, 10, 12, 14, 16, 18, 20, 22, 24],
            };
            ns.into_iter()
                .map(|n| {
                    let u = 0.1 / n as f64;
                    Panel {
                        spec: LandscapeSpec::ising(IsingVariant::Noninteracting, n),
                        landscapes: 1,
                        runs: ising_runs(scale),
                        configs: vec![
                            ConfigPoint::new(Algorithm::Il, 100, u),
                            ConfigPoint::new(Algorithm::Raw, 1, 0.0),
                            ConfigPoint::new(Algorithm::Aga, 100, u),
                            ConfigPoint::new(Algorithm::Sga, 100, u),
                        ],
                        baseline_m: vec![100],
                    }
                })
                .collect()
        }
        FigureId::A2 => {
            fits = vec![(Algorithm::Raw, ScalingModel::Quadratic)];
            let ns = match scale {
                Scale::Desk => vec![8, 12, 16, 20, 24],
                Scale::Full => vec![8, 12, 16, 20, 24, 28, 32],
            };
            // The cooperative searches are exponential here; the desk grid
            // keeps them to the sizes where runs finish.
            let coop_limit = match scale {
                Scale::Desk => 16,
                Scale::Full => 20,
            };
            ns.into_iter()
                .map(|n| {
                    let u = 0.1 / n as f64;
                    let mut configs = vec![ConfigPoint::new(Algorithm::Raw, 1, 0.0)];
                    if n <= coop_limit {
                        configs.extend(COOPERATIVE.iter().map(|&a| ConfigPoint::new(a, 100, u)));
                    }
                    Panel {
                        spec: LandscapeSpec::ising(IsingVariant::Ferromagnetic, n),
                        landscapes: 1,
                        runs: ising_runs(scale),
                        configs,
                        baseline_m: vec![100],
                    }
                })
                .collect()
        }
    };
    FigureSpec {
        id,
        scale,
        panels,
        fits,
    }
}

/// One scaling fit of mean halting time against `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub family: crate::landscape::Family,
    pub algorithm: Algorithm,
    pub model: String,
    pub a: f64,
    /// Second coefficient; empty for one-parameter models.
    pub b: Option<f64>,
    pub r_squared: f64,
    pub log_log_slope: f64,
    pub points: usize,
}

#[derive(Debug, Clone)]
pub struct FigureData {
    pub spec: FigureSpec,
    pub tables: Vec<CostTable>,
    pub baseline: Vec<BaselineRow>,
    pub fits: Vec<FitRow>,
}

impl FigureData {
    pub fn rows(&self) -> impl Iterator<Item = &CostRow> {
        self.tables.iter().flat_map(|t| t.rows.iter())
    }

    pub fn traces(&self) -> impl Iterator<Item = &TraceRow> {
        self.tables.iter().flat_map(|t| t.traces.iter())
    }

    pub fn failures(&self) -> impl Iterator<Item = &Failure> {
        self.tables.iter().flat_map(|t| t.failures.iter())
    }

    pub fn warnings(&self) -> impl Iterator<Item = &String> {
        self.tables.iter().flat_map(|t| t.warnings.iter())
    }
}

/// Where a figure's ensembles come from.
#[derive(Debug, Clone, Copy)]
pub enum EnsembleSource<'a> {
    /// Generate in memory.
    Memory,
    /// Load from `<root>/<spec dir>`, generating and saving missing ensembles.
    Disk(&'a Path),
}

fn panel_ensemble(panel: &Panel, master_seed: u64, source: EnsembleSource<'_>) -> Result<Ensemble> {
    match source {
        EnsembleSource::Memory => Ensemble::generate(panel.spec, panel.landscapes, master_seed),
        EnsembleSource::Disk(root) => {
            let dir: PathBuf = root.join(panel.spec.dir_name());
            if dir.join(super::MANIFEST_FILE).exists() {
                let manifest = read_manifest(&dir)?;
                if manifest.entries.len() >= panel.landscapes {
                    return Ok(load_ensemble(&dir)?.truncated(panel.landscapes));
                }
                return Err(Error::param(format!(
                    "{} holds {} landscapes but the figure needs {}",
                    dir.display(),
                    manifest.entries.len(),
                    panel.landscapes
                )));
            }
            build_ensemble(panel.spec, panel.landscapes, master_seed, root, false)?;
            load_ensemble(&dir)
        }
    }
}

fn fit_rows(spec: &FigureSpec, tables: &[CostTable]) -> Vec<FitRow> {
    let mut out = Vec::new();
    for &(algorithm, model) in &spec.fits {
        let points: Vec<(f64, f64)> = tables
            .iter()
            .flat_map(|t| t.rows.iter())
            .filter(|r| r.algorithm == algorithm && r.mean_tstar.is_finite())
            .map(|r| (r.n as f64, r.mean_tstar))
            .collect();
        let Some(family) = tables.first().map(|t| t.spec.family) else {
            continue;
        };
        let (Ok(fit), Ok(slope)) = (fit_scaling(&points, model), log_log_slope(&points)) else {
            continue;
        };
        out.push(FitRow {
            family,
            algorithm,
            model: model.as_str().to_string(),
            a: fit.coefficients[0],
            b: fit.coefficients.get(1).copied(),
            r_squared: fit.r_squared,
            log_log_slope: slope,
            points: points.len(),
        });
    }
    out
}

/// Run every panel of a figure.
pub fn run_figure(
    spec: &FigureSpec,
    master_seed: u64,
    jobs: Option<usize>,
    source: EnsembleSource<'_>,
) -> Result<FigureData> {
    let mut tables = Vec::new();
    let mut baseline = Vec::new();
    for panel in &spec.panels {
        let ensemble = panel_ensemble(panel, master_seed, source)?;
        let plan = ExperimentPlan::new(panel.configs.clone(), panel.runs, master_seed).with_jobs(jobs);
        tables.push(run_experiment(&plan, &ensemble)?);
        if panel.spec.family == crate::landscape::Family::IsingFerromagnetic {
            // The plotted baseline uses the two-target success probability.
            for &m in &panel.baseline_m {
                let model = crate::analytics::BlindSearchModel::degenerate(panel.spec.n, m)?;
                baseline.push(BaselineRow {
                    family: panel.spec.family,
                    n: panel.spec.n,
                    k: panel.spec.k,
                    m,
                    p: model.p,
                    mean_tstar: model.mean_halting_time(),
                    mean_cost: model.mean_cost(panel.spec.n),
                });
            }
        } else {
            baseline.extend(bs_baseline(&panel.spec, &panel.baseline_m)?);
        }
    }
    let fits = fit_rows(spec, &tables);
    Ok(FigureData {
        spec: spec.clone(),
        tables,
        baseline,
        fits,
    })
}

pub const FITS_FILE: &str = "fits.csv";

/// Write `results.csv`, `trace.csv`, `baseline.csv`, `fits.csv` (when the
/// figure has fits) and one metadata file per panel under `dir`.
pub fn export_figure(data: &FigureData, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for (i, table) in data.tables.iter().enumerate() {
        let panel_dir = dir.join(format!("panel_{i:02}_{}", table.spec.dir_name()));
        written.extend(export_results(table, &panel_dir, false)?);
    }
    let rows: Vec<CostRow> = data.rows().cloned().collect();
    let path = dir.join(super::RESULTS_FILE);
    super::write_results(&rows, &path)?;
    written.push(path);

    let traces: Vec<TraceRow> = data.traces().cloned().collect();
    let path = dir.join(super::TRACE_FILE);
    super::write_trace(&traces, &path)?;
    written.push(path);

    let path = dir.join(super::BASELINE_FILE);
    super::write_baseline(&data.baseline, &path)?;
    written.push(path);

    if !data.spec.fits.is_empty() {
        let path = dir.join(FITS_FILE);
        let mut w = csv::Writer::from_path(&path).map_err(|e| Error::csv(&path, e))?;
        for f in &data.fits {
            w.serialize(f).map_err(|e| Error::csv(&path, e))?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
