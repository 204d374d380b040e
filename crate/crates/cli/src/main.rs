//! `nk-arena`: generate landscape ensembles, run search experiments, print
//! closed-form baselines and produce figure data.
//!
//! Exit status: 0 on success, 1 on a usage error, 2 on a runtime or I/O error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nk_arena::rng::DEFAULT_SEED;

pub const DATA_ENV: &str = "NK_ARENA_DATA";

#[derive(Parser, Debug)]
#[command(name = "nk-arena", version, about = "Cooperative search on NK and Ising landscapes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a landscape ensemble on disk.
    Gen(GenArgs),
    /// Run one configuration or a grid of configurations on an ensemble.
    Run(RunArgs),
    /// Landscape statistics: local maxima and neighbor correlation.
    Stats(StatsArgs),
    /// Produce the data set behind one figure.
    Figure(FigureArgs),
    /// Print closed-form blind-search values.
    Analytic(AnalyticArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Landscape family: nk, ising-ni or ising-f
    #[arg(long, default_value = "nk")]
    family: String,
    /// String length N
    #[arg(long)]
    n: usize,
    /// Epistasis K (NK only), 0 <= K <= N-1
    #[arg(long, default_value_t = 0)]
    k: usize,
    /// Number of landscapes
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Master seed
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Ensemble root [default: $NK_ARENA_DATA or ./data]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replace an existing ensemble directory
    #[arg(long)]
    overwrite: bool,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Ensemble directory (absolute, relative, or a name under the data root)
    #[arg(long)]
    ensemble: PathBuf,
    /// Algorithms, comma separated: il, aga, sga, bs, raw
    #[arg(long, value_delimiter = ',', default_value = "il")]
    algo: Vec<String>,
    /// Population sizes, comma separated (raw always uses 1)
    #[arg(long, value_delimiter = ',', default_value = "10")]
    m: Vec<usize>,
    /// Per-bit mutation probabilities, comma separated, each in [0, 0.5]
    #[arg(long, value_delimiter = ',', default_value = "0.1")]
    u: Vec<f64>,
    /// Runs per landscape
    #[arg(long, default_value_t = 1000)]
    runs: usize,
    /// Use only the first L landscapes of the ensemble [default: all]
    #[arg(long)]
    landscapes: Option<usize>,
    /// Halting-time cap [default: 100 * 2^N / M]
    #[arg(long)]
    tmax: Option<u64>,
    /// Master seed for the runs
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output directory
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Also write every run's halting time to runs.csv
    #[arg(long)]
    keep_runs: bool,
    /// Worker threads [default: logical cores]
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args, Debug)]
struct StatsArgs {
    /// Ensemble directory; alternatively give --n (and --k) to generate in memory
    #[arg(long, conflicts_with_all = ["family", "n", "k", "count"])]
    ensemble: Option<PathBuf>,
    /// Landscape family when generating: nk, ising-ni or ising-f
    #[arg(long, default_value = "nk")]
    family: String,
    /// String length N
    #[arg(long)]
    n: Option<usize>,
    /// Epistasis K (NK only)
    #[arg(long, default_value_t = 0)]
    k: usize,
    /// Number of landscapes to generate
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Master seed (ensemble generation and correlation sampling)
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Neighbor pairs sampled for the correlation estimate
    #[arg(long, default_value_t = 200_000)]
    pairs: usize,
}

#[derive(Args, Debug)]
struct FigureArgs {
    /// Figure: 1-7, A1 or A2
    #[arg(long)]
    which: String,
    /// desk trims N > 18 and uses smaller ensembles; full is the complete protocol
    #[arg(long, default_value = "desk")]
    scale: String,
    /// Output directory [default: figures/fig<which>]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Ensemble root; missing ensembles are generated there [default: $NK_ARENA_DATA or ./data]
    #[arg(long)]
    data: Option<PathBuf>,
    /// Generate ensembles in memory instead of reading or writing the data root
    #[arg(long, conflicts_with = "data")]
    no_cache: bool,
    /// Worker threads [default: logical cores]
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args, Debug)]
struct AnalyticArgs {
    /// Quantity: pmf, mean-t, cdf or mean-cost
    #[arg(long)]
    which: String,
    /// String length N
    #[arg(long)]
    n: usize,
    /// Population size
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Time for pmf and cdf; the cdf accepts inf
    #[arg(long)]
    t: Option<String>,
    /// Two global maxima: p = 1/2^(N-1)
    #[arg(long)]
    degenerate: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Run(a) => commands::run(a),
        Command::Stats(a) => commands::stats(a),
        Command::Figure(a) => commands::figure(a),
        Command::Analytic(a) => commands::analytic(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
