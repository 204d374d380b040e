//! Experiments: shared ensembles, parameter grids, parallel execution and
//! aggregation into cost and trace tables.
//!
//! An experiment runs every configuration of a plan on every landscape of one
//! ensemble. Work is split into units of (configuration, landscape, batch of
//! runs); each run draws from its own stream derived from the master seed,
//! the landscape seed, the configuration and the run index. Units are merged
//! by key and summed in fixed point, so the resulting tables are identical
//! for any number of worker threads.

mod aggregate;
mod ensemble;
mod export;
pub mod figures;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::landscape::{AnyLandscape, Family, Landscape, LandscapeSpec};
use crate::rng::{self, purpose};
use crate::search::{run_search, Algorithm, SearchConfig};

pub use aggregate::{fitness_ratio_trace, log_time_grid, success_fraction, ExactSum, TraceAccumulator};
pub use ensemble::{
    build_ensemble, landscape_seed, load_ensemble, read_manifest, Ensemble, Manifest, ManifestEntry, MANIFEST_FILE,
};
pub use export::{
    bs_baseline, export_results, import_results, read_trace, write_baseline, write_results, write_trace, BaselineRow,
    Metadata, BASELINE_FILE, METADATA_FILE, RESULTS_FILE, RUNS_FILE, TRACE_FILE,
};

/// Grid points per decade of the trace time axis.
pub const DEFAULT_GRID_PER_DECADE: usize = 20;

/// Runs per work unit.
pub const DEFAULT_BATCH: usize = 64;

/// `ceil(100 * 2^n / m)`, at least 1.
pub fn default_t_max(n: usize, m: usize) -> u64 {
    let t = (100.0 * 2f64.powi(n as i32) / m.max(1) as f64).ceil();
    if t >= u64::MAX as f64 {
        u64::MAX
    } else {
        (t as u64).max(1)
    }
}

/// One point of a parameter grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfigPoint {
    pub algorithm: Algorithm,
    pub m: usize,
    pub u: f64,
    /// `None` selects [`default_t_max`].
    pub t_max: Option<u64>,
}

impl ConfigPoint {
    pub fn new(algorithm: Algorithm, m: usize, u: f64) -> Self {
        ConfigPoint {
            algorithm,
            m,
            u,
            t_max: None,
        }
    }

    pub fn with_t_max(mut self, t_max: u64) -> Self {
        self.t_max = Some(t_max);
        self
    }

    fn resolved_t_max(&self, n: usize) -> u64 {
        self.t_max.unwrap_or_else(|| default_t_max(n, self.m))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub configs: Vec<ConfigPoint>,
    pub runs_per_landscape: usize,
    pub master_seed: u64,
    pub grid_per_decade: usize,
    /// Runs per work unit. Affects scheduling only, never results.
    pub batch: usize,
    /// Worker threads; `None` uses all cores. Affects scheduling only.
    #[serde(skip)]
    pub jobs: Option<usize>,
}

impl ExperimentPlan {
    pub fn new(configs: Vec<ConfigPoint>, runs_per_landscape: usize, master_seed: u64) -> Self {
        ExperimentPlan {
            configs,
            runs_per_landscape,
            master_seed,
            grid_per_decade: DEFAULT_GRID_PER_DECADE,
            batch: DEFAULT_BATCH,
            jobs: None,
        }
    }

    pub fn with_jobs(mut self, jobs: Option<usize>) -> Self {
        self.jobs = jobs;
        self
    }
}

/// Seed of one run.
pub fn run_seed(master_seed: u64, landscape_seed: u64, config: &ConfigPoint, run: usize) -> u64 {
    rng::derive_seed(
        master_seed,
        purpose::RUN,
        &[
            landscape_seed,
            config.algorithm.tag(),
            config.m as u64,
            config.u.to_bits(),
            run as u64,
        ],
    )
}

/// One row of the cost table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostRow {
    pub family: Family,
    pub n: usize,
    pub k: usize,
    pub algorithm: Algorithm,
    pub m: usize,
    pub u: f64,
    pub t_max: u64,
    pub landscapes: usize,
    pub runs_per_landscape: usize,
    /// `M t*/2^N` averaged over successful runs within each landscape, then
    /// over landscapes with at least one success.
    pub mean_cost: f64,
    /// Standard error over landscape means, or over runs when only one
    /// landscape contributed.
    pub stderr_cost: f64,
    /// Mean `t*` over all successful runs.
    pub mean_tstar: f64,
    pub censored_fraction: f64,
    pub success_fraction_final: f64,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub family: Family,
    pub n: usize,
    pub k: usize,
    pub algorithm: Algorithm,
    pub m: usize,
    pub u: f64,
    pub t: u64,
    /// Fraction of runs with `t* <= t`.
    pub pi_hat: f64,
    /// Best fitness at generation `t` over the global maximum, averaged over
    /// runs and then landscapes. Generation 0 is the initial population.
    pub phi_ratio: f64,
}

/// Per-run halting times of one configuration, `t_stars[landscape][run]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigRuns {
    pub config: ConfigPoint,
    pub t_stars: Vec<Vec<Option<u64>>>,
}

impl ConfigRuns {
    pub fn all(&self) -> Vec<Option<u64>> {
        self.t_stars.iter().flatten().copied().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub algorithm: Algorithm,
    pub m: usize,
    pub u: f64,
    pub landscape: Option<usize>,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct CostTable {
    pub spec: LandscapeSpec,
    pub plan: ExperimentPlan,
    pub landscape_seeds: Vec<u64>,
    pub rows: Vec<CostRow>,
    pub traces: Vec<TraceRow>,
    pub runs: Vec<ConfigRuns>,
    pub failures: Vec<Failure>,
    pub warnings: Vec<String>,
}

impl CostTable {
    pub fn row(&self, algorithm: Algorithm, m: usize) -> Option<&CostRow> {
        self.rows.iter().find(|r| r.algorithm == algorithm && r.m == m)
    }

    pub fn trace(&self, algorithm: Algorithm, m: usize) -> Vec<&TraceRow> {
        self.traces
            .iter()
            .filter(|r| r.algorithm == algorithm && r.m == m)
            .collect()
    }
}

struct Unit {
    config: usize,
    landscape: usize,
    runs: std::ops::Range<usize>,
}

struct UnitResult {
    t_stars: Vec<Option<u64>>,
    trace: TraceAccumulator,
}

fn run_unit(
    unit: &Unit,
    config: &ConfigPoint,
    landscape: &AnyLandscape,
    landscape_seed: u64,
    plan: &ExperimentPlan,
    grid: &[u64],
) -> Result<UnitResult> {
    let global = landscape.global_max_fitness();
    let mut trace = TraceAccumulator::new(grid.to_vec());
    let mut t_stars = Vec::with_capacity(unit.runs.len());
    for run in unit.runs.clone() {
        let search = SearchConfig::new(
            config.algorithm,
            config.m,
            config.u,
            config.resolved_t_max(landscape.n()),
            run_seed(plan.master_seed, landscape_seed, config, run),
        );
        let result = run_search(landscape, &search)?;
        t_stars.push(result.t_star());
        trace.add(&result, global);
    }
    Ok(UnitResult { t_stars, trace })
}

/// Run every configuration of `plan` on every landscape of `ensemble`.
///
/// Invalid configurations and failing work units are reported in
/// [`CostTable::failures`]; the other configurations still produce rows.
pub fn run_experiment(plan: &ExperimentPlan, ensemble: &Ensemble) -> Result<CostTable> {
    if plan.runs_per_landscape == 0 {
        return Err(Error::param("runs per landscape must be at least 1"));
    }
    if ensemble.is_empty() {
        return Err(Error::param("ensemble is empty"));
    }
    if plan.grid_per_decade == 0 || plan.batch == 0 {
        return Err(Error::param("grid density and batch size must be positive"));
    }
    let spec = ensemble.spec;
    let n = spec.n;

    let mut warnings = Vec::new();
    let mut failures = Vec::new();
    let mut configs = Vec::new();
    for &c in &plan.configs {
        let mut c = c;
        if c.algorithm == Algorithm::Raw {
            if c.m != 1 {
                warnings.push(format!("raw runs a single walker; m={} replaced by 1", c.m));
                c.m = 1;
            }
            // The walk has no mutation step.
            c.u = 0.0;
        }
        let check = SearchConfig::new(c.algorithm, c.m, c.u, c.resolved_t_max(n), 0).validate();
        match check {
            Ok(()) if !configs.contains(&c) => configs.push(c),
            Ok(()) => {}
            Err(e) => failures.push(Failure {
                algorithm: c.algorithm,
                m: c.m,
                u: c.u,
                landscape: None,
                message: e.to_string(),
            }),
        }
    }

    let grids: Vec<Vec<u64>> = configs
        .iter()
        .map(|c| log_time_grid(c.resolved_t_max(n), plan.grid_per_decade))
        .collect();

    let mut units = Vec::new();
    for ci in 0..configs.len() {
        for li in 0..ensemble.len() {
            let mut start = 0;
            while start < plan.runs_per_landscape {
                let end = (start + plan.batch).min(plan.runs_per_landscape);
                units.push(Unit {
                    config: ci,
                    landscape: li,
                    runs: start..end,
                });
                start = end;
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::param(format!("cannot start worker pool: {e}")))?;
    let results: Vec<Result<UnitResult>> = pool.install(|| {
        units
            .par_iter()
            .map(|u| {
                run_unit(
                    u,
                    &configs[u.config],
                    &ensemble.landscapes[u.landscape],
                    ensemble.seeds[u.landscape],
                    plan,
                    &grids[u.config],
                )
            })
            .collect()
    });

    // Units are in (config, landscape, batch) order, so merging in sequence
    // reproduces run order within each landscape.
    let l_count = ensemble.len();
    let mut merged: Vec<Vec<Option<(Vec<Option<u64>>, TraceAccumulator)>>> = configs
        .iter()
        .zip(&grids)
        .map(|(_, g)| {
            (0..l_count)
                .map(|_| Some((Vec::new(), TraceAccumulator::new(g.clone()))))
                .collect()
        })
        .collect();
    for (unit, result) in units.iter().zip(results) {
        let slot = &mut merged[unit.config][unit.landscape];
        match result {
            Ok(r) => {
                if let Some((ts, acc)) = slot {
                    ts.extend(r.t_stars);
                    acc.merge(&r.trace);
                }
            }
            Err(e) => {
                if slot.is_some() {
                    let c = &configs[unit.config];
                    failures.push(Failure {
                        algorithm: c.algorithm,
                        m: c.m,
                        u: c.u,
                        landscape: Some(unit.landscape),
                        message: e.to_string(),
                    });
                }
                *slot = None;
            }
        }
    }

    let mut rows = Vec::new();
    let mut traces = Vec::new();
    let mut runs = Vec::new();
    for ((config, grid), per_landscape) in configs.iter().zip(&grids).zip(merged) {
        let done: Vec<(Vec<Option<u64>>, TraceAccumulator)> = per_landscape.into_iter().flatten().collect();
        if done.is_empty() {
            continue;
        }
        let (row, trace_rows) = summarize(&spec, config, grid, &done, plan);
        if row.censored_fraction > 0.0 {
            warnings.push(format!(
                "{} m={} u={}: {:.1}% of runs censored; mean cost covers successful runs only",
                row.algorithm,
                row.m,
                row.u,
                100.0 * row.censored_fraction
            ));
        }
        rows.push(row);
        traces.extend(trace_rows);
        runs.push(ConfigRuns {
            config: *config,
            t_stars: done.into_iter().map(|(ts, _)| ts).collect(),
        });
    }

    Ok(CostTable {
        spec,
        plan: plan.clone(),
        landscape_seeds: ensemble.seeds.clone(),
        rows,
        traces,
        runs,
        failures,
        warnings,
    })
}

fn summarize(
    spec: &LandscapeSpec,
    config: &ConfigPoint,
    grid: &[u64],
    done: &[(Vec<Option<u64>>, TraceAccumulator)],
    plan: &ExperimentPlan,
) -> (CostRow, Vec<TraceRow>) {
    let space = 2f64.powi(spec.n as i32);
    let scale = config.m as f64 / space;

    let mut total_runs = 0usize;
    let mut total_hits = 0usize;
    let mut total_t: u128 = 0;
    let mut landscape_costs = Vec::new();
    let mut run_costs = Vec::new();
    for (ts, _) in done {
        let hits: Vec<u64> = ts.iter().flatten().copied().collect();
        total_runs += ts.len();
        total_hits += hits.len();
        let sum: u128 = hits.iter().map(|&t| t as u128).sum();
        total_t += sum;
        if !hits.is_empty() {
            landscape_costs.push(scale * (sum as f64 / hits.len() as f64));
        }
        if done.len() == 1 {
            run_costs.extend(hits.iter().map(|&t| scale * t as f64));
        }
    }

    let (mean_cost, stderr_cost) = if landscape_costs.len() >= 2 {
        aggregate::mean_and_stderr(&landscape_costs)
    } else {
        let (_, se) = aggregate::mean_and_stderr(&run_costs);
        let mean = landscape_costs.first().copied().unwrap_or(f64::NAN);
        (mean, se)
    };
    let mean_tstar = if total_hits > 0 {
        total_t as f64 / total_hits as f64
    } else {
        f64::NAN
    };
    let success = total_hits as f64 / total_runs as f64;

    let row = CostRow {
        family: spec.family,
        n: spec.n,
        k: spec.k,
        algorithm: config.algorithm,
        m: config.m,
        u: config.u,
        t_max: config.resolved_t_max(spec.n),
        landscapes: done.len(),
        runs_per_landscape: plan.runs_per_landscape,
        mean_cost,
        stderr_cost,
        mean_tstar,
        censored_fraction: 1.0 - success,
        success_fraction_final: success,
        master_seed: plan.master_seed,
    };

    let all: Vec<Option<u64>> = done.iter().flat_map(|(ts, _)| ts.iter().copied()).collect();
    let pi = success_fraction(&all, grid);
    let mut phi = vec![ExactSum::default(); grid.len()];
    for (_, acc) in done {
        for (s, m) in phi.iter_mut().zip(acc.means()) {
            s.add(m);
        }
    }
    let trace = grid
        .iter()
        .zip(pi)
        .zip(phi)
        .map(|((&t, pi_hat), phi)| TraceRow {
            family: spec.family,
            n: spec.n,
            k: spec.k,
            algorithm: config.algorithm,
            m: config.m,
            u: config.u,
            t,
            pi_hat,
            phi_ratio: phi.mean(done.len()),
        })
        .collect();
    (row, trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::IsingVariant;

    fn small_plan(jobs: Option<usize>) -> ExperimentPlan {
        let mut plan = ExperimentPlan::new(
            vec![
                ConfigPoint::new(Algorithm::Il, 10, 0.05),
                ConfigPoint::new(Algorithm::Bs, 10, 0.0),
                ConfigPoint::new(Algorithm::Raw, 1, 0.0),
            ],
            20,
            9,
        )
        .with_jobs(jobs);
        plan.batch = 7;
        plan
    }

    #[test]
    fn default_t_max_values() {
        assert_eq!(default_t_max(12, 10), 40960);
        assert_eq!(default_t_max(12, 1000), 410);
        assert_eq!(default_t_max(4, 10_000), 1);
        assert_eq!(default_t_max(64, 1), u64::MAX);
    }

    #[test]
    fn tables_do_not_depend_on_worker_count() {
        let e = Ensemble::generate(LandscapeSpec::nk(8, 2), 3, 4).unwrap();
        let a = run_experiment(&small_plan(Some(1)), &e).unwrap();
        let b = run_experiment(&small_plan(Some(4)), &e).unwrap();
        assert_eq!(a.rows, b.rows);
        assert_eq!(a.traces, b.traces);
        assert_eq!(a.runs, b.runs);
        let mut c_plan = small_plan(Some(3));
        c_plan.batch = 1;
        let c = run_experiment(&c_plan, &e).unwrap();
        assert_eq!(a.rows, c.rows);
    }

    #[test]
    fn mean_tstar_matches_retained_runs() {
        let e = Ensemble::generate(LandscapeSpec::nk(8, 2), 3, 4).unwrap();
        let table = run_experiment(&small_plan(None), &e).unwrap();
        for (row, runs) in table.rows.iter().zip(&table.runs) {
            let hits: Vec<u64> = runs.all().into_iter().flatten().collect();
            let mean = hits.iter().sum::<u64>() as f64 / hits.len() as f64;
            assert_eq!(row.mean_tstar, mean);
            assert_eq!(runs.all().len(), 60);
        }
    }

    #[test]
    fn trace_is_monotone_and_ends_at_success_fraction() {
        let e = Ensemble::generate(LandscapeSpec::nk(8, 2), 3, 4).unwrap();
        let table = run_experiment(&small_plan(None), &e).unwrap();
        for row in &table.rows {
            let tr = table.trace(row.algorithm, row.m);
            assert_eq!(tr[0].t, 0);
            assert_eq!(tr[0].pi_hat, 0.0);
            assert!(tr.windows(2).all(|w| w[0].pi_hat <= w[1].pi_hat));
            assert!(tr.windows(2).all(|w| w[0].phi_ratio <= w[1].phi_ratio + 1e-15));
            assert!(tr.iter().all(|r| r.phi_ratio <= 1.0 + 1e-15));
            assert_eq!(tr.last().unwrap().pi_hat, row.success_fraction_final);
        }
    }

    #[test]
    fn censoring_is_reported() {
        let e = Ensemble::generate(LandscapeSpec::nk(12, 0), 2, 1).unwrap();
        let plan = ExperimentPlan::new(vec![ConfigPoint::new(Algorithm::Bs, 1, 0.0).with_t_max(5)], 10, 1);
        let table = run_experiment(&plan, &e).unwrap();
        let row = &table.rows[0];
        assert_eq!(row.t_max, 5);
        assert!(row.censored_fraction > 0.9);
        assert_eq!(row.censored_fraction + row.success_fraction_final, 1.0);
    }

    #[test]
    fn invalid_configs_become_failures() {
        let e = Ensemble::generate(LandscapeSpec::ising(IsingVariant::Noninteracting, 8), 1, 1).unwrap();
        let plan = ExperimentPlan::new(
            vec![
                ConfigPoint::new(Algorithm::Sga, 1, 0.1),
                ConfigPoint::new(Algorithm::Raw, 5, 0.0),
            ],
            5,
            1,
        );
        let table = run_experiment(&plan, &e).unwrap();
        assert_eq!(table.failures.len(), 1);
        assert_eq!(table.rows.len(), 1);
        assert_eq!(table.rows[0].m, 1);
        assert_eq!(table.warnings.len(), 1);
        // Single landscape: stderr comes from the runs.
        assert!(table.rows[0].stderr_cost.is_finite());
    }
}
