use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use churnnet::harness::config::{Config, ConfigError};
use churnnet::harness::run::run_with_state;
use churnnet::harness::snapshot::{export_snapshot, import_snapshot, SnapshotError};
use churnnet::harness::{aggregate, csv, run_sweep, RunError};
use churnnet::metrics::{self, MetricSet};
use churnnet::seed::DERIVATION_DOC;
use churnnet::SimState;

#[derive(Parser)]
#[command(
    name = "churnnet",
    version,
    about = "Power-budgeted wireless topologies under churn"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one parameter point and write its summary row.
    Simulate {
        #[command(flatten)]
        opts: CommonOpts,
        /// Also write the per-sample time series here.
        #[arg(long)]
        series: Option<PathBuf>,
    },
    /// Run a sweep described by a `key = value` spec file.
    Sweep {
        spec: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
        /// Worker threads; results do not depend on this.
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Run equilibration and measurement steps, then export the final network.
    Snapshot {
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Measure a snapshot file.
    Analyze {
        snapshot: PathBuf,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Flags mirror the config keys. Values are kept as text so sweep axes can
/// be given as comma-separated lists.
#[derive(Args)]
struct CommonOpts {
    /// Base configuration file (`key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    pmin: Option<String>,
    #[arg(long)]
    pmax: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    equil: Option<String>,
    #[arg(long)]
    measure: Option<String>,
    #[arg(long = "sample-interval")]
    sample_interval: Option<String>,
    #[arg(long)]
    replicates: Option<String>,
    /// Robustness deletion trials per sample.
    #[arg(long)]
    trials: Option<String>,
    /// `full` or `basic` (degree, power and connectivity only).
    #[arg(long)]
    metrics: Option<String>,
    /// Coupling rule such as `pmax = 2 * pmin`; repeatable.
    #[arg(long)]
    couple: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Config(String),
    Runtime(String),
    Io(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Runtime(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Runtime(m) | Failure::Io(m) => m,
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Params(p) => Failure::Config(p.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<SnapshotError> for Failure {
    fn from(e: SnapshotError) -> Self {
        match e {
            SnapshotError::Io(_) => Failure::Io(e.to_string()),
            other => Failure::Config(other.to_string()),
        }
    }
}

fn load_config(opts: &CommonOpts, base: Option<&Path>) -> Result<Config, Failure> {
    let mut config = match base.or(opts.config.as_deref()) {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            Config::parse(&text)?
        }
        None => Config::default(),
    };
    let flags = [
        ("model", &opts.model),
        ("q", &opts.q),
        ("n", &opts.n),
        ("pmin", &opts.pmin),
        ("pmax", &opts.pmax),
        ("delta", &opts.delta),
        ("seed", &opts.seed),
        ("equil", &opts.equil),
        ("measure", &opts.measure),
        ("sample_interval", &opts.sample_interval),
        ("replicates", &opts.replicates),
        ("trials", &opts.trials),
        ("metrics", &opts.metrics),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            config.set(key, v)?;
        }
    }
    for c in &opts.couple {
        config.set("couple", c)?;
    }
    Ok(config)
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn header_comments(config: &Config) -> Vec<String> {
    let mut lines = vec![format!("churnnet {}", env!("CARGO_PKG_VERSION"))];
    lines.extend(config.render());
    lines.push(DERIVATION_DOC.to_string());
    lines
}

fn simulate(opts: &CommonOpts, series: Option<&Path>) -> Result<(), Failure> {
    let config = load_config(opts, None)?;
    let (params, set) = config.to_params()?;
    let (output, _) = run_with_state(&params, set)?;
    let row = aggregate(&params, std::slice::from_ref(&output));
    let comments = header_comments(&config);
    write_out(opts.out.as_deref(), &csv::summary_csv(&comments, &[row]))?;
    if let Some(path) = series {
        let text = csv::series_csv(&comments, &output.samples);
        fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn sweep(spec_path: &Path, opts: &CommonOpts, workers: usize) -> Result<(), Failure> {
    let config = load_config(opts, Some(spec_path))?;
    let spec = config.to_sweep_spec()?;
    let result = run_sweep(&spec, workers);
    let mut comments = header_comments(&config);
    for f in &result.failures {
        comments.push(format!(
            "failure point={} replicate={} seed={}: {}",
            f.point, f.replicate, f.seed, f.message
        ));
    }
    write_out(
        opts.out.as_deref(),
        &csv::summary_csv(&comments, &result.rows),
    )?;
    for f in &result.failures {
        eprintln!("point {} replicate {}: {}", f.point, f.replicate, f.message);
    }
    if result.has_runtime_failure() {
        return Err(Failure::Runtime("one or more runs failed".into()));
    }
    if !result.failures.is_empty() {
        return Err(Failure::Config(
            "one or more points had invalid parameters".into(),
        ));
    }
    Ok(())
}

fn snapshot(opts: &CommonOpts) -> Result<(), Failure> {
    let config = load_config(opts, None)?;
    let (params, _) = config.to_params()?;
    let Some(out) = opts.out.as_deref() else {
        return Err(Failure::Config("snapshot needs --out <path>".into()));
    };
    let mut state =
        SimState::bootstrap(params.clone()).map_err(|e| Failure::Config(e.to_string()))?;
    for _ in 0..params.equil_steps + params.measure_steps {
        state
            .churn_step()
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    state
        .net
        .check_invariants()
        .map_err(|e| Failure::Runtime(e.to_string()))?;
    export_snapshot(&state.net, &params, out)?;
    Ok(())
}

fn analyze(path: &Path, trials: Option<usize>, out: Option<&Path>) -> Result<(), Failure> {
    let (net, params) = import_snapshot(path)?;
    let trials = trials.unwrap_or(params.robustness_trials);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let sample = metrics::measure(&net, 0, MetricSet::Full, trials, &mut rng);
    let comments = vec![format!("analysis of {}", path.display())];
    write_out(out, &csv::series_csv(&comments, &[sample]))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate { opts, series } => simulate(opts, series.as_deref()),
        Command::Sweep {
            spec,
            opts,
            workers,
        } => sweep(spec, opts, *workers),
        Command::Snapshot { opts } => snapshot(opts),
        Command::Analyze {
            snapshot,
            trials,
            out,
        } => analyze(snapshot, *trials, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
