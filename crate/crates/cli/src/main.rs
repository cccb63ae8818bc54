//! Command-line driver for the entangled-qubit thermodynamics experiments.
//!
//! Exit codes: 0 on success, 1 when a validation suite fails (or on runtime
//! errors), 2 on configuration problems.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use entherm_cli::checks::{self, Status};
use entherm_cli::config::{ExperimentConfig, SetupSelection};
use entherm_cli::csvout;
use entherm_cli::runner;

#[derive(Parser)]
#[command(
    name = "entherm",
    version,
    about = "Open-system thermodynamics of an entangled qubit pair: \
             three-setup relaxation runs, temperature sweeps, a two-stage \
             work-extraction protocol, and a validation suite"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time-grid run: per-setup diagnostics or the three-setup gap report.
    Simulate(RunArgs),
    /// Temperature sweeps: common bath temperature or fixed-mean differences.
    SweepTemp(SweepArgs),
    /// Two-stage work-extraction and thermalization protocol.
    Protocol(ProtocolArgs),
    /// Run every invariant suite and report pass/fail with residuals.
    Validate(ValidateArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// JSON config file; missing fields fall back to defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Which setup to run: a (both baths), b (bath on A), c (bath on B), all.
    #[arg(long)]
    setup: Option<String>,
    /// Time-grid start in seconds.
    #[arg(long)]
    t_min: Option<f64>,
    /// Time-grid end in seconds.
    #[arg(long)]
    t_max: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    points: Option<usize>,
    /// Logarithmic time spacing (`--log` or `--log false`).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    log: Option<bool>,
    /// Output CSV path; the gnuplot script lands next to it.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Seed for the randomized validation suites.
    #[arg(long)]
    seed: Option<u64>,
    /// Direct decoherence-factor override for bath A (1/s).
    #[arg(long)]
    gamma_a: Option<f64>,
    /// Direct decoherence-factor override for bath B (1/s).
    #[arg(long)]
    gamma_b: Option<f64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Sweep mode: `common` (one shared temperature) or `delta`
    /// (temperature differences at fixed mean).
    #[arg(long, default_value = "common")]
    mode: String,
}

#[derive(Args)]
struct ProtocolArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of thermalization steps.
    #[arg(long)]
    steps: Option<usize>,
    /// Target bath temperature in kelvin.
    #[arg(long)]
    temperature: Option<f64>,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    common: CommonArgs,
}

fn config_error(problems: &[String]) -> ExitCode {
    eprintln!("configuration is invalid:");
    for p in problems {
        eprintln!("  - {p}");
    }
    ExitCode::from(2)
}

fn resolve(common: &CommonArgs) -> Result<ExperimentConfig, Vec<String>> {
    let mut config = match &common.config {
        Some(path) => ExperimentConfig::from_file(path).map_err(|e| vec![e])?,
        None => ExperimentConfig::default(),
    };
    if let Some(setup) = &common.setup {
        config.setup = SetupSelection::parse(setup).map_err(|e| vec![e])?;
    }
    if let Some(v) = common.t_min {
        config.t_min = v;
    }
    if let Some(v) = common.t_max {
        config.t_max = v;
    }
    if let Some(v) = common.points {
        config.points = v;
    }
    if let Some(v) = common.log {
        config.log_spacing = v;
    }
    if let Some(v) = &common.output {
        config.output = v.to_string_lossy().into_owned();
    }
    if let Some(v) = common.seed {
        config.seed = v;
    }
    if let Some(v) = common.gamma_a {
        config.gamma_a = Some(v);
    }
    if let Some(v) = common.gamma_b {
        config.gamma_b = Some(v);
    }
    config.validate()?;
    Ok(config)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Simulate(args) => {
            let config = match resolve(&args.common) {
                Ok(c) => c,
                Err(problems) => return Ok(config_error(&problems)),
            };
            let output = runner::run_simulate(&config)?;
            let emitted =
                csvout::write_simulate(&config, &output, std::path::Path::new(&config.output))?;
            println!("wrote {} and {}", emitted.csv.display(), emitted.plot.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::SweepTemp(args) => {
            let mut config = match resolve(&args.common) {
                Ok(c) => c,
                Err(problems) => return Ok(config_error(&problems)),
            };
            config.sweep.mode = args.mode.clone();
            if let Err(problems) = config.validate() {
                return Ok(config_error(&problems));
            }
            let emitted = match config.sweep.mode.as_str() {
                "common" => {
                    let rows = runner::run_sweep_common(&config)?;
                    csvout::write_sweep_common(
                        &config,
                        &rows,
                        std::path::Path::new(&config.output),
                    )?
                }
                "delta" => {
                    let blocks = runner::run_sweep_delta(&config)?;
                    csvout::write_sweep_delta(
                        &config,
                        &blocks,
                        std::path::Path::new(&config.output),
                    )?
                }
                other => return Ok(config_error(&[format!("unknown sweep mode {other:?}")])),
            };
            println!("wrote {} and {}", emitted.csv.display(), emitted.plot.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Protocol(args) => {
            let mut config = match resolve(&args.common) {
                Ok(c) => c,
                Err(problems) => return Ok(config_error(&problems)),
            };
            if let Some(steps) = args.steps {
                config.protocol.steps = steps;
            }
            if let Some(temperature) = args.temperature {
                config.protocol.temperature_kelvin = temperature;
            }
            if let Err(problems) = config.validate() {
                return Ok(config_error(&problems));
            }
            let output = runner::run_protocol(&config)?;
            let emitted =
                csvout::write_protocol(&config, &output, std::path::Path::new(&config.output))?;
            let stage2 = &output.trace.stage2;
            println!(
                "stage1 work extracted: {:e} 1/s; stage2 total work to weight: {:e} 1/s, \
                 total heat from bath: {:e} 1/s, final TV distance: {:e}",
                output.trace.stage1.work_extracted,
                stage2.total_work_to_weight,
                stage2.total_heat_from_bath,
                stage2.achieved_distance
            );
            println!("wrote {} and {}", emitted.csv.display(), emitted.plot.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate(args) => {
            let config = match resolve(&args.common) {
                Ok(c) => c,
                Err(problems) => return Ok(config_error(&problems)),
            };
            let results = checks::run_all(&config);
            let mut failed = 0usize;
            for check in &results {
                println!("{}", check.line());
                if check.status == Status::Fail {
                    failed += 1;
                }
            }
            let gated = results.iter().filter(|c| c.status != Status::Info).count();
            println!(
                "summary: {} checks, {} gated, {failed} failed (seed {})",
                results.len(),
                gated,
                config.seed
            );
            if failed > 0 {
                Ok(ExitCode::from(1))
            } else {
                Ok(ExitCode::SUCCESS)
            }
        }
    }
}
