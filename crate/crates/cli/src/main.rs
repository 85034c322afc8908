use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use adwpt::analytic;
use adwpt::bench::{self, BenchError, ExperimentSpec, FigureId};
use adwpt::mcsim::{self, SimConfig};
use adwpt::radopt;
use adwpt::ScenarioParams;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

/// Closed-form statistics, simulation and radius optimization for adaptively
/// directional wireless power transfer.
#[derive(Parser)]
#[command(name = "adwpt", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file with key=value lines.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override a scenario or simulation key; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    #[arg(long, global = true, value_name = "N")]
    trials: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Print closed-form metrics for a scenario.
    Analytic,
    /// Run Monte Carlo trials and print a summary.
    Simulate,
    /// Radius maximizing the mean received power.
    OptimizeMean,
    /// Radius maximizing the Gamma-approximated active probability.
    OptimizeActive,
    /// Write the data of one figure as CSV files plus a manifest.
    Figure {
        /// Figure id, e.g. fig2 or 2.
        id: String,
    },
    /// Run the invariant suite.
    Validate,
}

fn load(common: &Common) -> Result<(ScenarioParams, SimConfig), BenchError> {
    let (params, mut config) = bench::load_config(common.config.as_deref(), &common.set)?;
    if let Some(seed) = common.seed {
        config.master_seed = seed;
    }
    if let Some(trials) = common.trials {
        config.trials = trials;
    }
    if common.workers.is_some() {
        config.workers = common.workers;
    }
    Ok((params, config))
}

fn print_json(value: &serde_json::Value) {
    // A closed pipe (e.g. `| head`) is not an error worth a panic.
    let _ = writeln!(
        std::io::stdout().lock(),
        "{}",
        serde_json::to_string_pretty(value).expect("json serializes")
    );
}

fn analytic_report(params: &ScenarioParams) -> Result<serde_json::Value, BenchError> {
    let gamma = analytic::gamma_approx(params)?;
    let gamma_omni = analytic::gamma_approx_omni(params)?;
    let (near_ratio, far_ratio) = analytic::near_far_mean_ratios(params);
    Ok(json!({
        "scenario": params,
        "attenuation_db": params.attenuation_db(),
        "sector_empty_prob": analytic::sector_empty_prob(params),
        "mean_power_w": analytic::mean_power(params),
        "mean_power_omni_w": analytic::mean_power_omni(params),
        "variance_w2": analytic::variance_power(params),
        "variance_omni_w2": analytic::variance_omni(params),
        "near_mean_ratio": near_ratio,
        "far_mean_ratio": far_ratio,
        "gamma_shape": gamma.shape,
        "gamma_scale_w": gamma.scale,
        "gamma_shape_omni": gamma_omni.shape,
        "gamma_scale_omni_w": gamma_omni.scale,
        "active_probability": gamma.ccdf(params.power_threshold)?,
        "active_probability_omni": gamma_omni.ccdf(params.power_threshold)?,
        "d_mean_d_rho_w_per_m": analytic::d_mean_d_rho(params),
    }))
}

fn write_file(path: &Path, write: impl FnOnce(&mut Vec<u8>) -> Result<(), mcsim::McError>) -> Result<(), BenchError> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    fs::write(path, buf).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn run(cli: Cli) -> Result<bool, BenchError> {
    let common = &cli.common;
    match &cli.command {
        Command::Analytic => {
            let (params, _) = load(common)?;
            print_json(&analytic_report(&params)?);
        }
        Command::Simulate => {
            let (params, config) = load(common)?;
            let summary = mcsim::run_trials(&params, &config)?;
            print_json(&mcsim::summary_json(&summary, &params, &config));
            if let Some(dir) = &common.out {
                fs::create_dir_all(dir).map_err(|source| BenchError::Io {
                    path: dir.clone(),
                    source,
                })?;
                write_file(&dir.join("samples.csv"), |b| {
                    mcsim::write_samples_csv(b, &summary.samples)
                })?;
                write_file(&dir.join("summary.json"), |b| {
                    mcsim::write_summary_json(b, &summary, &params, &config)
                })?;
            }
        }
        Command::OptimizeMean => {
            let (params, _) = load(common)?;
            let opt = radopt::optimal_radius_mean(&params)?;
            print_json(&json!({ "scenario": params, "optimum": opt }));
        }
        Command::OptimizeActive => {
            let (params, _) = load(common)?;
            let opt = radopt::optimal_radius_active(&params, params.power_threshold)?;
            let omni = analytic::gamma_ccdf_omni(params.power_threshold, &params)?;
            print_json(&json!({
                "scenario": params,
                "optimum": opt,
                "active_probability_omni": omni,
            }));
        }
        Command::Figure { id } => {
            let figure_id: FigureId = id.parse()?;
            let mut overrides = Vec::new();
            if let Some(path) = &common.config {
                let text = fs::read_to_string(path).map_err(|source| BenchError::Io {
                    path: path.clone(),
                    source,
                })?;
                adwpt::scenario::ScenarioBuilder::parse(&text)?;
                overrides.extend(
                    text.lines()
                        .map(|l| l.split('#').next().unwrap_or("").trim().to_string())
                        .filter(|l| !l.is_empty()),
                );
            }
            overrides.extend(common.set.iter().cloned());
            let spec = ExperimentSpec {
                figure_id,
                overrides,
                output_dir: common
                    .out
                    .clone()
                    .unwrap_or_else(|| PathBuf::from(format!("{}", figure_id).to_lowercase())),
                seed: common.seed.unwrap_or(0),
                trials: common.trials,
                workers: common.workers,
            };
            let manifest = bench::run_figure(&spec)?;
            for f in &manifest.files {
                println!("{}", spec.output_dir.join(&f.name).display());
            }
            println!("{}", spec.output_dir.join("manifest.json").display());
        }
        Command::Validate => {
            let (params, mut config) = load(common)?;
            if common.trials.is_none() && !common.set.iter().any(|s| s.starts_with("trials=")) {
                config.trials = 2_000;
            }
            let checks = bench::validate_invariants(&params, &config)?;
            let mut stdout = std::io::stdout().lock();
            let mut ok = true;
            for c in &checks {
                ok &= c.passed;
                let mark = if c.passed { "PASS" } else { "FAIL" };
                let _ = writeln!(stdout, "{mark} {}: {}", c.name, c.detail);
            }
            return Ok(ok);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
