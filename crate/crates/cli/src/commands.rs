use std::fmt;
use std::path::{Path, PathBuf};

use nk_arena::analytics::BlindSearchModel;
use nk_arena::harness::figures::{export_figure, figure_spec, run_figure, EnsembleSource, FigureId, Scale};
use nk_arena::harness::{build_ensemble, export_results, load_ensemble, run_experiment, ConfigPoint, ExperimentPlan};
use nk_arena::landscape::{count_local_maxima, neighbor_correlation, Family, IsingVariant, Landscape, LandscapeSpec};
use nk_arena::{Algorithm, Ensemble};

use crate::{AnalyticArgs, FigureArgs, GenArgs, RunArgs, StatsArgs, DATA_ENV};

pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<nk_arena::Error> for CliError {
    fn from(e: nk_arena::Error) -> Self {
        match e {
            nk_arena::Error::Parameter(_) | nk_arena::Error::Capability(_) => CliError::Usage(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

type CliResult = Result<(), CliError>;

fn data_root() -> PathBuf {
    std::env::var_os(DATA_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("data"))
}

fn parse_spec(family: &str, n: usize, k: usize) -> Result<LandscapeSpec, CliError> {
    let family: Family = family.parse()?;
    let spec = match family {
        Family::Nk => LandscapeSpec::nk(n, k),
        Family::IsingNoninteracting | Family::IsingFerromagnetic if k != 0 => {
            return Err(CliError::Usage("--k applies to NK landscapes only".into()))
        }
        Family::IsingNoninteracting => LandscapeSpec::ising(IsingVariant::Noninteracting, n),
        Family::IsingFerromagnetic => LandscapeSpec::ising(IsingVariant::Ferromagnetic, n),
    };
    spec.validate()?;
    Ok(spec)
}

pub fn gen(a: GenArgs) -> CliResult {
    let spec = parse_spec(&a.family, a.n, a.k)?;
    if a.count == 0 {
        return Err(CliError::Usage("--count must be at least 1".into()));
    }
    let root = a.out.unwrap_or_else(data_root);
    let manifest = build_ensemble(spec, a.count, a.seed, &root, a.overwrite)?;
    let maxima = match (manifest.mean_local_maxima(), manifest.mean_maxima_density()) {
        (Some(m), Some(d)) => format!("mean local maxima {m:.2}, density {d:.5}"),
        _ => "local maxima not counted".to_string(),
    };
    println!(
        "wrote {} landscapes to {} ({maxima}, manifest sha256 {})",
        manifest.entries.len(),
        manifest.dir.display(),
        manifest.digest
    );
    Ok(())
}

fn resolve_ensemble(path: &Path) -> PathBuf {
    if !path.exists() && path.is_relative() {
        let under_root = data_root().join(path);
        if under_root.exists() {
            return under_root;
        }
    }
    path.to_path_buf()
}

pub fn run(a: RunArgs) -> CliResult {
    let algorithms = a
        .algo
        .iter()
        .map(|s| s.parse::<Algorithm>())
        .collect::<Result<Vec<_>, _>>()?;
    if a.runs == 0 {
        return Err(CliError::Usage("--runs must be at least 1".into()));
    }
    if let Some(u) = a.u.iter().find(|u| !(0.0..=0.5).contains(*u)) {
        return Err(CliError::Usage(format!("--u {u} outside [0, 0.5]")));
    }
    if a.tmax == Some(0) || a.m.contains(&0) || a.landscapes == Some(0) || a.jobs == Some(0) {
        return Err(CliError::Usage("--tmax, --m, --landscapes and --jobs must be positive".into()));
    }

    let mut configs = Vec::new();
    for &algorithm in &algorithms {
        for &m in &a.m {
            for &u in &a.u {
                let mut c = ConfigPoint::new(algorithm, m, u);
                c.t_max = a.tmax;
                if !configs.contains(&c) {
                    configs.push(c);
                }
            }
        }
    }

    let dir = resolve_ensemble(&a.ensemble);
    let mut ensemble = load_ensemble(&dir)?;
    if let Some(l) = a.landscapes {
        ensemble = ensemble.truncated(l);
    }
    let plan = ExperimentPlan::new(configs, a.runs, a.seed).with_jobs(a.jobs);
    let table = run_experiment(&plan, &ensemble)?;
    for w in &table.warnings {
        eprintln!("warning: {w}");
    }
    for f in &table.failures {
        eprintln!("failed: {} m={} u={}: {}", f.algorithm, f.m, f.u, f.message);
    }
    let written = export_results(&table, &a.out, a.keep_runs)?;

    println!(
        "{:<9} {:>6} {:>10} {:>12} {:>10} {:>12} {:>9}",
        "algorithm", "m", "u", "mean_cost", "stderr", "mean_tstar", "censored"
    );
    for r in &table.rows {
        println!(
            "{:<9} {:>6} {:>10} {:>12.6} {:>10.6} {:>12.2} {:>9.4}",
            r.algorithm,
            r.m,
            r.u,
            r.mean_cost,
            r.stderr_cost,
            r.mean_tstar,
            r.censored_fraction
        );
    }
    for p in written {
        println!("wrote {}", p.display());
    }
    if table.rows.is_empty() {
        return Err(CliError::Usage("no configuration could be run".into()));
    }
    Ok(())
}

pub fn stats(a: StatsArgs) -> CliResult {
    let ensemble = match (&a.ensemble, a.n) {
        (Some(path), _) => load_ensemble(&resolve_ensemble(path))?,
        (None, Some(n)) => {
            let spec = parse_spec(&a.family, n, a.k)?;
            Ensemble::generate(spec, a.count, a.seed)?
        }
        (None, None) => return Err(CliError::Usage("give --ensemble or --n".into())),
    };
    let spec = ensemble.spec;
    println!("landscapes: {}", ensemble.len());
    println!("family: {}  N: {}  K: {}", spec.family, spec.n, spec.k);

    let mut maxima = Vec::with_capacity(ensemble.len());
    for l in &ensemble.landscapes {
        match count_local_maxima(l) {
            Ok(s) => maxima.push(s.local_maxima_count),
            Err(nk_arena::Error::Capability(m)) => {
                println!("local maxima: not counted ({m})");
                break;
            }
            Err(e) => return Err(e.into()),
        }
    }
    if maxima.len() == ensemble.len() {
        let mean = maxima.iter().sum::<u64>() as f64 / maxima.len() as f64;
        println!("mean local maxima: {mean:.3}");
        println!("maxima density: {:.6}", mean / 2f64.powi(spec.n as i32));
    }
    let alpha = ensemble.landscapes[0].epistasis().unwrap_or(0) as f64 / spec.n as f64;
    println!("alpha (K/N): {alpha:.4}");
    if spec.family == Family::Nk {
        println!("neighbor correlation, 1-(K+1)/N: {:.6}", 1.0 - (spec.k + 1) as f64 / spec.n as f64);
    }
    let r = neighbor_correlation(&ensemble.landscapes, a.pairs, a.seed)?;
    println!("neighbor correlation, sampled over {} pairs: {r:.6}", a.pairs);
    Ok(())
}

pub fn figure(a: FigureArgs) -> CliResult {
    let id: FigureId = a.which.parse()?;
    let scale: Scale = a.scale.parse()?;
    if a.jobs == Some(0) {
        return Err(CliError::Usage("--jobs must be positive".into()));
    }
    let spec = figure_spec(id, scale);
    let root = a.data.unwrap_or_else(data_root);
    let source = if a.no_cache {
        EnsembleSource::Memory
    } else {
        EnsembleSource::Disk(&root)
    };
    let data = run_figure(&spec, a.seed, a.jobs, source)?;
    let out = a.out.unwrap_or_else(|| PathBuf::from(format!("figures/fig{id}")));
    let written = export_figure(&data, &out)?;

    let warnings = data.warnings().count();
    for f in data.failures() {
        eprintln!("failed: {} m={} u={}: {}", f.algorithm, f.m, f.u, f.message);
    }
    println!(
        "figure {id}: {} panels, {} rows, {} trace points, {} baseline rows, {warnings} warnings",
        spec.panels.len(),
        data.rows().count(),
        data.traces().count(),
        data.baseline.len()
    );
    for f in &data.fits {
        match f.b {
            Some(b) => println!(
                "fit {} {}: a={:.4} b={:.4} R2={:.4} slope={:.3}",
                f.algorithm, f.model, f.a, b, f.r_squared, f.log_log_slope
            ),
            None => println!(
                "fit {} {}: c={:.4} R2={:.4} slope={:.3}",
                f.algorithm, f.model, f.a, f.r_squared, f.log_log_slope
            ),
        }
    }
    println!("wrote {} files under {}", written.len(), out.display());
    Ok(())
}

fn parse_time(s: &str) -> Result<f64, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "∞" => Ok(f64::INFINITY),
        v => v
            .parse::<f64>()
            .map_err(|_| CliError::Usage(format!("--t {s:?} is not a number"))),
    }
}

pub fn analytic(a: AnalyticArgs) -> CliResult {
    let model = if a.degenerate {
        BlindSearchModel::degenerate(a.n, a.m)?
    } else {
        BlindSearchModel::single(a.n, a.m)?
    };
    let t = a.t.as_deref().map(parse_time).transpose()?;
    let value = match (a.which.as_str(), t) {
        ("mean-t", _) => model.mean_halting_time(),
        ("mean-cost", _) => model.mean_cost(a.n),
        // P(t* <= t); tends to 1 as t grows and equals 1 at t = inf.
        ("cdf", Some(t)) => model.success_cdf(t),
        ("pmf", Some(t)) => {
            if !(t >= 1.0 && t.is_finite() && t.fract() == 0.0) {
                return Err(CliError::Usage("pmf needs an integer --t >= 1".into()));
            }
            model.halting_pmf(t as u64)?
        }
        ("cdf" | "pmf", None) => return Err(CliError::Usage(format!("--which {} needs --t", a.which))),
        (w, _) => {
            return Err(CliError::Usage(format!(
                "unknown --which {w:?} (expected pmf, mean-t, cdf or mean-cost)"
            )))
        }
    };
    println!("{value}");
    Ok(())
}
