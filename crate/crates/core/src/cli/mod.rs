//! The `dais` command-line harness.
//!
//! Exit codes: 0 success, 2 configuration error, 3 runtime error.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::baselines::NgviConfig;
use crate::engine::DaisConfig;
use crate::error::DaisError;
use crate::experiments::{
    default_gamma_grid, fit_slopes, initial_params, logistic_pipeline, posterior_moments,
    rmse_sweep, run_method, run_monitor, InitSpec, Method, MonitorTarget, RmseConfig, TargetSpec,
};
use crate::targets::{load_logistic_csv, synthetic_logistic_data};
use output::{
    moments_csv, monitor_csv, rmse_csv, trace_csv, vector_csv, write_file, write_json, Summary,
};

#[derive(Debug, Parser)]
#[command(
    name = "dais",
    version,
    about = "Doubly adaptive importance sampling experiments"
)]
pub struct Cli {
    /// Seed for every random stream; overrides seeds in a run config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads for per-sample evaluation.
    #[arg(long, global = true, env = "DAIS_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one method on one target from a JSON config.
    Run(RunArgs),
    /// Estimator RMSE against the exact damped moments over a γ grid.
    Rmse(RmseArgs),
    /// Track γ and the negative ELBO over a fixed number of iterations.
    Monitor(MonitorArgs),
    /// Bayesian logistic regression: Laplace fit, then the chosen method.
    Logistic(LogisticArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// JSON experiment config.
    pub config: PathBuf,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RmseArgs {
    #[arg(long, default_value_t = 10)]
    pub d: usize,
    #[arg(long = "s-count", default_value_t = 100)]
    pub s_count: usize,
    #[arg(long, default_value_t = 100)]
    pub replications: usize,
    /// Comma-separated γ values; defaults to 10^-3, 10^-2.5, …, 1.
    #[arg(long, value_delimiter = ',')]
    pub gammas: Option<Vec<f64>>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MonitorArgs {
    /// sine2d or corr-gauss-100.
    #[arg(long)]
    pub target: String,
    #[arg(long = "s-count", default_value_t = 100_000)]
    pub s_count: usize,
    #[arg(long = "n-ess", default_value_t = 1_000.0)]
    pub n_ess: f64,
    /// Robustness constant; 0.1 for sine2d and 0.3 for corr-gauss-100 by default.
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, default_value_t = 100)]
    pub iters: usize,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct LogisticArgs {
    /// Numeric CSV with labels and features.
    #[arg(
        long,
        conflicts_with = "synthetic",
        required_unless_present = "synthetic"
    )]
    pub csv: Option<PathBuf>,
    /// Generate `N D SEED` synthetic data instead.
    #[arg(long, num_args = 3, value_names = ["N", "D", "SEED"])]
    pub synthetic: Option<Vec<u64>>,
    /// Labels are in the last column instead of the first.
    #[arg(long)]
    pub labels_last: bool,
    #[arg(long)]
    pub has_header: bool,
    #[arg(long)]
    pub no_intercept: bool,
    /// dais, ngvi or plain-ais.
    #[arg(long, default_value = "dais")]
    pub method: String,
    #[arg(long = "s-count")]
    pub s_count: Option<usize>,
    #[arg(long = "n-ess")]
    pub n_ess: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long = "max-iters")]
    pub max_iters: Option<usize>,
    #[arg(long = "step-size")]
    pub step_size: Option<f64>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

/// A failure, split by who has to fix it.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Runtime(m) => write!(f, "runtime error: {m}"),
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

/// Config errors from the library stay config errors at run time.
fn classify(e: DaisError) -> CliError {
    match e {
        DaisError::InvalidConfig(_) => CliError::Config(e.to_string()),
        other => CliError::Runtime(other.to_string()),
    }
}

/// The JSON document accepted by `dais run`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub method: Method,
    pub target: TargetSpec,
    #[serde(default)]
    pub init: InitSpec,
    #[serde(default)]
    pub dais: DaisConfig,
    #[serde(default)]
    pub ngvi: NgviConfig,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Resolves relative paths against `base` and applies a seed override.
    fn prepare(&mut self, base: &Path, seed: Option<u64>) {
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let TargetSpec::LogisticCsv { path, .. } = &mut self.target {
            resolve(path);
        }
        if let InitSpec::Explicit { mean, cov } = &mut self.init {
            resolve(mean);
            resolve(cov);
        }
        if let Some(dir) = &mut self.output_dir {
            resolve(dir);
        }
        if let Some(s) = seed {
            self.dais.seed = s;
            self.ngvi.seed = s;
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        match self.method {
            Method::Dais | Method::PlainAis => self.dais.validate().map_err(config_err),
            Method::Ngvi => self.ngvi.validate().map_err(config_err),
        }
    }
}

fn cmd_run(args: &RunArgs, seed: Option<u64>) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| config_err(format!("{}: {e}", args.config.display())))?;
    let mut config: ExperimentConfig = serde_json::from_str(&text).map_err(config_err)?;
    let base = args
        .config
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_default();
    config.prepare(&base, seed);
    config.validate()?;
    let out = args
        .out
        .clone()
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));

    let target = config.target.build().map_err(config_err)?;
    let initial = match &config.init {
        InitSpec::Explicit { .. } => initial_params(&config.init, &target).map_err(config_err)?,
        _ => initial_params(&config.init, &target).map_err(classify)?,
    };

    let start = Instant::now();
    let report = run_method(config.method, &initial, &target, &config.dais, &config.ngvi)
        .map_err(classify)?;
    let wall_seconds = start.elapsed().as_secs_f64();

    std::fs::create_dir_all(&out).map_err(runtime_err)?;
    write_file(
        &out.join("trace.csv"),
        &trace_csv(&report.records, target.dim()),
    )?;
    write_file(
        &out.join("final_mean.csv"),
        &vector_csv("mean", report.final_params.mean().as_slice()),
    )?;
    write_file(
        &out.join("final_cov.csv"),
        &crate::io::matrix_csv(report.final_params.covariance()),
    )?;
    let method_config = match config.method {
        Method::Ngvi => serde_json::to_value(&config.ngvi),
        _ => serde_json::to_value(&config.dais),
    }
    .map_err(runtime_err)?;
    let summary = Summary {
        method: config.method.as_str().into(),
        target: serde_json::to_value(&config.target).map_err(runtime_err)?,
        config: serde_json::json!({
            "init": config.init,
            "settings": method_config,
        }),
        iterations: report.records.len(),
        stopped_reason: report.stopped_reason.as_str().into(),
        wall_seconds,
    };
    write_json(&out.join("summary.json"), &summary)
}

fn cmd_rmse(args: &RmseArgs, seed: u64) -> Result<(), CliError> {
    let config = RmseConfig {
        d: args.d,
        s_count: args.s_count,
        replications: args.replications,
        gammas: args.gammas.clone().unwrap_or_else(default_gamma_grid),
        seed,
    };
    config.validate().map_err(config_err)?;
    let rows = rmse_sweep(&config).map_err(classify)?;
    std::fs::create_dir_all(&args.out).map_err(runtime_err)?;
    write_file(&args.out.join("rmse.csv"), &rmse_csv(&rows))?;
    let slopes_path = args.out.join("slopes.json");
    match fit_slopes(&rows, 1e-3, 1e-1) {
        Some(slopes) => write_json(&slopes_path, &slopes),
        None => {
            if slopes_path.exists() {
                std::fs::remove_file(&slopes_path).map_err(runtime_err)?;
            }
            Ok(())
        }
    }
}

fn cmd_monitor(args: &MonitorArgs, seed: u64) -> Result<(), CliError> {
    let target: MonitorTarget = args.target.parse().map_err(config_err)?;
    let c = args.c.unwrap_or_else(|| target.default_c());
    let probe = DaisConfig {
        s_count: args.s_count,
        n_ess: args.n_ess,
        robustness_c: c,
        ..DaisConfig::default()
    };
    probe.validate().map_err(config_err)?;
    let rows =
        run_monitor(target, args.s_count, args.n_ess, c, seed, args.iters).map_err(classify)?;
    std::fs::create_dir_all(&args.out).map_err(runtime_err)?;
    write_file(&args.out.join("monitor.csv"), &monitor_csv(&rows))
}

fn cmd_logistic(args: &LogisticArgs, seed: u64) -> Result<(), CliError> {
    let method: Method = serde_json::from_value(serde_json::Value::String(args.method.clone()))
        .map_err(|_| {
            config_err(format!(
                "unknown method {:?}; expected dais, ngvi or plain-ais",
                args.method
            ))
        })?;
    let (data, target_spec) = match (&args.csv, &args.synthetic) {
        (Some(path), _) => {
            let spec = TargetSpec::LogisticCsv {
                path: path.clone(),
                labels_first_column: !args.labels_last,
                has_header: args.has_header,
                add_intercept: !args.no_intercept,
            };
            let data =
                load_logistic_csv(path, !args.labels_last, args.has_header, !args.no_intercept)
                    .map_err(config_err)?;
            (data, spec)
        }
        (None, Some(v)) => {
            let (n, d, data_seed) = (v[0] as usize, v[1] as usize, v[2]);
            let data = synthetic_logistic_data(n, d, data_seed).map_err(config_err)?;
            (
                data,
                TargetSpec::LogisticSynthetic {
                    n,
                    d,
                    seed: data_seed,
                },
            )
        }
        (None, None) => return Err(config_err("either --csv or --synthetic is required")),
    };

    let mut dais = DaisConfig {
        seed,
        ..DaisConfig::default()
    };
    if let Some(s) = args.s_count {
        dais.s_count = s;
    }
    if let Some(n) = args.n_ess {
        dais.n_ess = n;
    }
    if let Some(c) = args.c {
        dais.robustness_c = c;
    }
    let mut ngvi = NgviConfig {
        seed,
        ..NgviConfig::default()
    };
    if let Some(s) = args.s_count {
        ngvi.s_count = s;
    }
    if let Some(z) = args.step_size {
        ngvi.step_size = z;
    }
    if let Some(m) = args.max_iters {
        dais.max_iters = m;
        ngvi.max_iters = m;
    }
    match method {
        Method::Ngvi => ngvi.validate().map_err(config_err)?,
        _ => dais.validate().map_err(config_err)?,
    }

    let start = Instant::now();
    let outcome = logistic_pipeline(data, method, &dais, &ngvi, 50, 1e-8).map_err(classify)?;
    let wall_seconds = start.elapsed().as_secs_f64();

    std::fs::create_dir_all(&args.out).map_err(runtime_err)?;
    let moments = posterior_moments(&outcome.report.final_params);
    write_file(&args.out.join("moments.csv"), &moments_csv(&moments))?;
    let settings = match method {
        Method::Ngvi => serde_json::to_value(&ngvi),
        _ => serde_json::to_value(&dais),
    }
    .map_err(runtime_err)?;
    let summary = Summary {
        method: method.as_str().into(),
        target: serde_json::to_value(&target_spec).map_err(runtime_err)?,
        config: serde_json::json!({
            "init": {"kind": "laplace", "newton_iterations": outcome.laplace.iterations},
            "settings": settings,
        }),
        iterations: outcome.report.records.len(),
        stopped_reason: outcome.report.stopped_reason.as_str().into(),
        wall_seconds,
    };
    write_json(&args.out.join("summary.json"), &summary)
}

/// Executes a parsed command line.
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(config_err("thread count must be positive"));
        }
        crate::par::configure_threads(n);
    }
    let seed = cli.seed.unwrap_or(0);
    match &cli.command {
        Command::Run(a) => cmd_run(a, cli.seed),
        Command::Rmse(a) => cmd_rmse(a, seed),
        Command::Monitor(a) => cmd_monitor(a, seed),
        Command::Logistic(a) => cmd_logistic(a, seed),
    }
}

/// Entry point for the binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dais: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
