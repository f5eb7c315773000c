//! Command-line front end. Each subcommand is thin orchestration over one
//! library module: it loads the experiment config, runs the computation and
//! writes fixed-name CSV artifacts into the output directory. Every command
//! is a pure function of config file plus seed — identical inputs produce
//! byte-identical outputs.
//!
//! Exit codes: 0 success, 1 input/config/IO error, 2 regime or numeric
//! precondition failure. `classify` reports a non-high-temperature verdict
//! through exit code 2 as well, with the verdict JSON still printed.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::bounds::{self, BOUND_WINDOW_M, BOUND_WINDOW_U};
use crate::config::ExperimentConfig;
use crate::definetti::{mixing_law, ConcentrationReport, DeFinettiDensity};
use crate::error::{CwError, Result};
use crate::exactdist::{self, LcltReport};
use crate::export;
use crate::mcmc::{self, ChainConfig};
use crate::model::{CouplingMatrix, ModelSpec};
use crate::regime::{self, ParameterPoint};

pub const PMF_CSV: &str = "pmf.csv";
pub const LCLT_CSV: &str = "lclt.csv";
pub const DENSITY_CSV: &str = "definetti_density.csv";
pub const CONCENTRATION_CSV: &str = "definetti_concentration.csv";
pub const BOUNDS_CSV: &str = "bounds_scan.csv";
pub const MCMC_CSV: &str = "mcmc_empirical.csv";

/// Default per-axis resolution of the bound scan (matches the acceptance
/// grid of 10^4 points over the documented window).
pub const DEFAULT_SCAN_POINTS: usize = 100;

#[derive(Parser)]
#[command(
    name = "cwlab",
    version,
    about = "Exact finite-size numerics for the multi-group Curie-Weiss model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment configuration file (.toml or .json).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Directory for CSV artifacts (created if missing).
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    /// Worker thread count (0 or omitted: all cores).
    #[arg(long, global = true, value_name = "K")]
    threads: Option<usize>,
    /// PRNG seed; takes precedence over seeds in the config file.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the regime verdict for the configured model as JSON.
    Classify,
    /// Write the exact magnetization pmf (pmf.csv).
    Pmf,
    /// Sweep local limit errors across n (lclt.csv).
    Lclt,
    /// Write the mixing density and concentration sweep
    /// (definetti_density.csv, definetti_concentration.csv).
    Definetti,
    /// Write the characteristic-function bound scan (bounds_scan.csv).
    Bounds,
    /// Run the Metropolis chain and write its empirical pmf
    /// (mcmc_empirical.csv).
    Mcmc,
}

/// What a subcommand produced: lines for stdout plus the process exit code.
struct CmdOutput {
    stdout: Vec<String>,
    exit: u8,
}

impl CmdOutput {
    fn ok() -> Self {
        Self { stdout: Vec::new(), exit: 0 }
    }
}

/// Parse arguments, dispatch, print, and return the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    if let Some(k) = cli.threads {
        // A global pool may already exist (e.g. repeated in-process calls);
        // that only affects parallelism, never results.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    match dispatch(&cli) {
        Ok(output) => {
            for line in &output.stdout {
                println!("{line}");
            }
            output.exit
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli) -> Result<CmdOutput> {
    let config_path = cli.config.as_ref().ok_or_else(|| {
        CwError::Config("--config <path> is required for every subcommand".into())
    })?;
    let config = ExperimentConfig::from_path(config_path)?;
    match cli.command {
        Command::Classify => cmd_classify(&config),
        Command::Pmf => cmd_pmf(&config, &cli.out),
        Command::Lclt => cmd_lclt(&config, &cli.out),
        Command::Definetti => cmd_definetti(&config, &cli.out),
        Command::Bounds => cmd_bounds(&config, &cli.out),
        Command::Mcmc => cmd_mcmc(&config, &cli.out, cli.seed),
    }
}

fn build_model(config: &ExperimentConfig) -> Result<ModelSpec> {
    let (model, warnings) = config.model()?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    Ok(model)
}

fn out_file(dir: &Path, name: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    Ok(dir.join(name))
}

fn cmd_classify(config: &ExperimentConfig) -> Result<CmdOutput> {
    let (model, warnings) = config.model_allowing_indefinite()?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    let alpha = regime::empirical_alpha(&model.groups);
    let decision = regime::classify(&model.coupling, &alpha)?;
    let verdict = serde_json::json!({
        "regime": if decision.is_high_temperature() { "high" } else { "other" },
        "reason": decision.reason,
    });
    Ok(CmdOutput {
        stdout: vec![verdict.to_string()],
        exit: if decision.is_high_temperature() { 0 } else { 2 },
    })
}

fn cmd_pmf(config: &ExperimentConfig, out: &Path) -> Result<CmdOutput> {
    let model = build_model(config)?;
    let cap = config
        .pmf()
        .and_then(|s| s.state_cap)
        .unwrap_or(exactdist::DEFAULT_STATE_CAP);
    let table = exactdist::exact_pmf_with_cap(&model, cap)?;
    export::write_pmf_csv(&out_file(out, PMF_CSV)?, &table)?;
    Ok(CmdOutput::ok())
}

fn cmd_lclt(config: &ExperimentConfig, out: &Path) -> Result<CmdOutput> {
    let section = config
        .lclt()
        .ok_or_else(|| CwError::Config("the lclt subcommand needs an [lclt] section".into()))?;
    let model = build_model(config)?;
    let alpha = match &section.alpha {
        Some(values) => ParameterPoint::new(values.clone())?,
        None => regime::empirical_alpha(&model.groups),
    };
    // Fail before the sweep when the coupling is outside the regime.
    let decision = regime::classify(&model.coupling, &alpha)?;
    if !decision.is_high_temperature() {
        return Err(CwError::OutsideRegime(decision.reason));
    }
    let reports = lclt_sweep(&model.coupling, &alpha, &section.sweep)?;
    export::write_lclt_csv(&out_file(out, LCLT_CSV)?, &reports)?;
    Ok(CmdOutput::ok())
}

/// For each total size n: split n into group sizes at the given weights,
/// compute the exact pmf, and measure local-limit and covariance errors
/// against the limit covariance evaluated at the realized finite-n weights.
/// Runs n-values in parallel; reports come back in sweep order.
pub fn lclt_sweep(
    coupling: &CouplingMatrix,
    alpha: &ParameterPoint,
    sweep: &[u64],
) -> Result<Vec<LcltReport>> {
    use rayon::prelude::*;
    sweep
        .par_iter()
        .map(|&n| {
            let groups = regime::group_sizes_for(alpha, n)?;
            let spec = ModelSpec::new(groups, coupling.clone())?;
            let table = exactdist::exact_pmf(&spec)?;
            let alpha_n = regime::empirical_alpha(&spec.groups);
            let cov = regime::limit_covariance(coupling, &alpha_n)?;
            exactdist::local_clt_error(&table, &cov)
        })
        .collect()
}

fn cmd_definetti(config: &ExperimentConfig, out: &Path) -> Result<CmdOutput> {
    let model = build_model(config)?;
    let section = config.definetti();
    let points = section.and_then(|s| s.points_per_axis);
    let density = density_for(&model, points)?;
    export::write_density_csv(&out_file(out, DENSITY_CSV)?, &density)?;

    let mut output = CmdOutput::ok();
    if let Some(conc) = section.and_then(|s| s.concentration.as_ref()) {
        let sweep = match &conc.sweep {
            Some(s) => s.clone(),
            None => vec![model.groups.total()],
        };
        let reports = concentration_sweep(&model, conc.delta, &sweep, points)?;
        export::write_concentration_csv(&out_file(out, CONCENTRATION_CSV)?, &reports)?;
    }
    if section.is_some_and(|s| s.mixture_check) {
        let exact = exactdist::exact_pmf(&model)?;
        let mixture = density.mixture_pmf()?;
        let diff = exact.max_abs_prob_diff(&mixture)?;
        output.stdout.push(format!("mixture_max_abs_diff={}", export::fmt_float(diff)));
    }
    Ok(output)
}

fn density_for(model: &ModelSpec, points: Option<usize>) -> Result<DeFinettiDensity> {
    match points {
        Some(q) => DeFinettiDensity::new(mixing_law(model)?, q),
        None => DeFinettiDensity::for_model(model),
    }
}

/// Tail mass outside radius `delta` for each total size in the sweep, with
/// group sizes split at the model's empirical weights. Runs n-values in
/// parallel; reports come back in sweep order.
pub fn concentration_sweep(
    model: &ModelSpec,
    delta: f64,
    sweep: &[u64],
    points: Option<usize>,
) -> Result<Vec<ConcentrationReport>> {
    use rayon::prelude::*;
    let alpha = regime::empirical_alpha(&model.groups);
    sweep
        .par_iter()
        .map(|&n| {
            let groups = regime::group_sizes_for(&alpha, n)?;
            let spec = ModelSpec::new(groups, model.coupling.clone())?;
            density_for(&spec, points)?.tail_mass(delta)
        })
        .collect()
}

fn cmd_bounds(config: &ExperimentConfig, out: &Path) -> Result<CmdOutput> {
    let section = config.bounds();
    let m_half = section.and_then(|s| s.m_half).unwrap_or(BOUND_WINDOW_M);
    let u_half = section.and_then(|s| s.u_half).unwrap_or(BOUND_WINDOW_U);
    let points_m = section.and_then(|s| s.points_m).unwrap_or(DEFAULT_SCAN_POINTS);
    let points_u = section.and_then(|s| s.points_u).unwrap_or(DEFAULT_SCAN_POINTS);
    let rows = bounds::margin_scan(m_half, u_half, points_m, points_u)?;
    export::write_bound_scan_csv(&out_file(out, BOUNDS_CSV)?, &rows)?;
    Ok(CmdOutput::ok())
}

fn cmd_mcmc(config: &ExperimentConfig, out: &Path, cli_seed: Option<u64>) -> Result<CmdOutput> {
    let section = config
        .mcmc()
        .ok_or_else(|| CwError::Config("the mcmc subcommand needs an [mcmc] section".into()))?;
    let model = build_model(config)?;
    let seed = cli_seed.or(section.seed).or(config.seed()).unwrap_or(0);
    let defaults = ChainConfig::with_defaults(&model.groups, seed, section.samples);
    let chain = ChainConfig::new(
        seed,
        section.burn_in.unwrap_or(defaults.burn_in),
        section.samples,
        section.thin.unwrap_or(defaults.thin),
    )?;
    let table = mcmc::run(&model, &chain)?;
    let meta = format!(
        "seed={},burn_in={},thin={},samples={}",
        chain.seed, chain.burn_in, chain.thin, chain.samples
    );
    export::write_pmf_csv_with_meta(&out_file(out, MCMC_CSV)?, &table, &meta)?;
    Ok(CmdOutput::ok())
}
