//! Command-line front end for the NOC gate experiments.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use nocgf::harness::{self, Csv, ExperimentConfig};
use nocgf::metrics::Gate;
use nocgf::sensitivity::Parameter;
use nocgf::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "nocgf",
    version,
    about = "Neighboring optimal control for TRP quantum gates"
)]
struct Cli {
    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Restrict to one or more gates (not, hadamard, pi8, phase, cphase).
    #[arg(long, global = true, value_parser = parse_gate)]
    gate: Vec<Gate>,
    /// Integration steps for every gate.
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Seed for noise realizations.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Noise realizations per point.
    #[arg(long, global = true)]
    realizations: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Improve one gate and print its error bounds.
    Improve,
    /// Ideal-control or bandwidth table.
    Table {
        #[arg(value_enum)]
        kind: TableKind,
    },
    /// Last-digit sensitivity of one sweep parameter.
    Sweep {
        #[arg(long, value_parser = parse_param)]
        param: Parameter,
    },
    /// Noise-averaged Tr P over a list of mean noise powers.
    Jitter {
        #[arg(long, value_delimiter = ',', required = true)]
        powers: Vec<f64>,
    },
    /// Spectrum of one control component as `omega,magnitude`.
    Spectrum {
        #[arg(long, value_enum, default_value_t = Component::X)]
        component: Component,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TableKind {
    Ideal,
    Bandwidth,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Component {
    X,
    Y,
    Z,
}

fn parse_gate(s: &str) -> std::result::Result<Gate, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_param(s: &str) -> std::result::Result<Parameter, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn config_from(cli: &Cli) -> Result<ExperimentConfig> {
    let mut config = match &cli.config {
        Some(path) => harness::load_config(path)?,
        None => ExperimentConfig::default(),
    };
    if !cli.gate.is_empty() {
        config.gates = cli.gate.clone();
    }
    if let Some(steps) = cli.steps {
        config.steps = Some(steps);
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(n) = cli.realizations {
        config.noise.realizations = n;
    }
    if let Some(out) = &cli.out {
        config.out = Some(out.clone());
    }
    config.validate()?;
    Ok(config)
}

fn single_gate(config: &ExperimentConfig, command: &str) -> Result<Gate> {
    match config.gates.as_slice() {
        [g] => Ok(*g),
        _ => Err(Error::Config {
            path: "gate".into(),
            reason: format!("`{command}` needs exactly one --gate"),
        }),
    }
}

fn emit(config: &ExperimentConfig, text: &str) -> Result<()> {
    match &config.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_csv(config: &ExperimentConfig, csv: &Csv) -> Result<()> {
    emit(config, &csv.render())
}

fn run(cli: Cli) -> Result<()> {
    harness::configure_threads()?;
    let config = config_from(&cli)?;
    match cli.command {
        Command::Improve => {
            let gate = single_gate(&config, "improve")?;
            let run = harness::run_gate(&config, gate)?;
            emit(&config, &harness::improve_summary(&run))
        }
        Command::Table {
            kind: TableKind::Ideal,
        } => emit_csv(
            &config,
            &harness::ideal_csv(&harness::run_ideal_table(&config)?),
        ),
        Command::Table {
            kind: TableKind::Bandwidth,
        } => emit_csv(
            &config,
            &harness::bandwidth_csv(&harness::run_bandwidth_table(&config)?),
        ),
        Command::Sweep { param } => emit_csv(
            &config,
            &harness::sensitivity_csv(&harness::run_sensitivity_sweep(&config, param)?),
        ),
        Command::Jitter { powers } => emit_csv(
            &config,
            &harness::jitter_csv(&harness::run_jitter_sweep(&config, &powers)?),
        ),
        Command::Spectrum { component } => {
            let gate = single_gate(&config, "spectrum")?;
            let s = harness::run_spectrum(&config, gate, component as usize)?;
            emit_csv(&config, &harness::spectrum_csv(&s))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
