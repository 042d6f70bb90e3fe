//! `qfchub`: design and simulation front end for PPLN conversion hubs.
//!
//! Exit status: 0 on success, 2 for usage or validation errors, 3 when a
//! numerical routine cannot produce a result.

mod commands;
mod config;
mod error;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{Map, Value};

use crate::commands::Outcome;
use crate::config::{ConfigFile, Format, Overrides, RunConfig};
use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "qfchub", version, about = "Quantum frequency conversion hub design tool")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// TOML run configuration; flags take precedence over its values.
    #[arg(long, env = "QFCHUB_CONFIG", global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Bundled model name (jundt1997, zelmon1997, deng2006) or a model file.
    #[arg(long, global = true)]
    material: Option<String>,
    /// Crystal temperature in °C.
    #[arg(long, global = true, allow_negative_numbers = true)]
    temperature: Option<f64>,
    /// Crystal length in mm.
    #[arg(long, global = true)]
    length: Option<f64>,
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Write data here instead of standard output.
    #[arg(long, short, global = true, value_name = "PATH")]
    output: Option<String>,
    /// Worker threads for sweeps (0 = one per core).
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct ConstraintArgs {
    /// Longest allowed converted wavelength (nm); also requires λ_c < λ_p.
    #[arg(long, conflicts_with = "separation")]
    pub cutoff: Option<f64>,
    /// Minimum pump–converted separation (nm).
    #[arg(long)]
    pub separation: Option<f64>,
    /// Efficiency fraction bounding the range.
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct ChannelArgs {
    #[arg(long, default_value_t = 1.0)]
    pub eta_cw: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eta_ccw: f64,
    /// Relative arm phase in rad.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phase: f64,
    /// Weight of a maximally mixed admixture.
    #[arg(long, default_value_t = 0.0)]
    pub depolarizing: f64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Refractive index, dispersion and group index at given wavelengths (nm).
    Index {
        #[arg(required = true, value_name = "NM")]
        wavelengths: Vec<f64>,
    },
    /// Phase-matching spectrum around a design point.
    PmScan {
        #[arg(long)]
        signal: f64,
        #[arg(long)]
        target: f64,
        /// Half-width of the converted-frequency window (THz).
        #[arg(long, default_value_t = 10.0)]
        window: f64,
        /// Sample spacing (GHz).
        #[arg(long, default_value_t = 5.0)]
        step: f64,
    },
    /// Tuning range of a device designed for signal → target.
    TuningRange {
        #[arg(long)]
        signal: f64,
        #[arg(long)]
        target: f64,
        #[command(flatten)]
        constraint: ConstraintArgs,
    },
    /// Tuning range versus signal wavelength for a fixed target.
    HubSweep {
        #[arg(long, default_value_t = 1540.0)]
        target: f64,
        #[arg(long, default_value_t = 400.0)]
        start: f64,
        #[arg(long, default_value_t = 1000.0)]
        end: f64,
        #[arg(long, default_value_t = 1.0)]
        step: f64,
        #[command(flatten)]
        constraint: ConstraintArgs,
    },
    /// Pump frequency for each DWDM port.
    Plan(PlanArgs),
    /// Relative conversion efficiency versus pump frequency.
    EfficiencyCurve {
        #[command(flatten)]
        plan: PlanArgs,
        /// Pump range low edge (THz); defaults to the laser range.
        #[arg(long)]
        pump_min: Option<f64>,
        #[arg(long)]
        pump_max: Option<f64>,
        /// Sample spacing (GHz).
        #[arg(long, default_value_t = 1.0)]
        step: f64,
    },
    /// Apply the polarization channel to input states.
    Simulate {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Inputs among H, V, D, A, R, L.
        #[arg(long = "input", value_delimiter = ',', default_value = "H,V,D,A,R,L")]
        inputs: Vec<String>,
    },
    /// Simulated process tomography and fidelity.
    Tomography {
        #[command(flatten)]
        channel: ChannelArgs,
    },
    /// Fit η_max·sin²(√(η_nor·P)) to a two-column CSV of (P_mW, eta).
    Fit {
        #[arg(long)]
        input: PathBuf,
    },
    /// Split pump power between the two arms to equalize their efficiencies.
    Balance {
        /// CCW arm as ETA_MAX,ETA_NOR.
        #[arg(long, value_parser = parse_pair, value_name = "ETA_MAX,ETA_NOR")]
        ccw: [f64; 2],
        /// CW arm as ETA_MAX,ETA_NOR.
        #[arg(long, value_parser = parse_pair, value_name = "ETA_MAX,ETA_NOR")]
        cw: [f64; 2],
        /// Total pump power (mW).
        #[arg(long)]
        total: f64,
    },
    /// Regenerate the standard data sets into a dated directory.
    ReproduceFigures {
        #[arg(long, default_value = "figures")]
        output_dir: PathBuf,
        /// Directory date (YYYY-MM-DD); today when omitted.
        #[arg(long)]
        date: Option<String>,
    },
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [a, b] => Ok([
            a.trim().parse().map_err(|e| format!("'{a}': {e}"))?,
            b.trim().parse().map_err(|e| format!("'{b}': {e}"))?,
        ]),
        _ => Err(format!("expected two comma-separated numbers, got '{s}'")),
    }
}

#[derive(Args, Debug, Clone, Default)]
pub struct PlanArgs {
    /// Signal frequency (THz).
    #[arg(long)]
    pub signal_freq: Option<f64>,
    /// Ignore any grid from the config file.
    #[arg(long)]
    pub grid_default: bool,
    #[arg(long)]
    pub anchor: Option<f64>,
    /// Port spacing (GHz).
    #[arg(long)]
    pub spacing: Option<f64>,
    #[arg(long)]
    pub ports: Option<u32>,
    #[arg(long)]
    pub laser_min: Option<f64>,
    #[arg(long)]
    pub laser_max: Option<f64>,
    /// Converted frequency the device is phase-matched at (THz); grid center by default.
    #[arg(long)]
    pub design_freq: Option<f64>,
}

fn resolve(common: &Common) -> Result<RunConfig, CliError> {
    let file = match &common.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    RunConfig::resolve(
        file,
        Overrides {
            material: common.material.clone(),
            temperature_c: common.temperature,
            length_mm: common.length,
            format: common.format,
            output: common.output.clone(),
            workers: common.workers,
        },
    )
}

fn emit(cfg: &RunConfig, name: &str, outcome: Outcome, start: Instant) -> Result<(), CliError> {
    let to_stdout = outcome.data.is_some() && cfg.output.is_none();
    if let Some(data) = &outcome.data {
        match &cfg.output {
            Some(path) => std::fs::write(path, data).map_err(|e| CliError::Io(format!("{path}: {e}")))?,
            None => std::io::stdout().write_all(data)?,
        }
    }
    let mut summary = Map::new();
    summary.insert("command".into(), Value::from(name));
    summary.extend(outcome.summary);
    if let Some(path) = &cfg.output {
        summary.insert("output".into(), Value::from(path.as_str()));
    }
    summary.insert("elapsed_s".into(), Value::from(start.elapsed().as_secs_f64()));
    let line = Value::Object(summary).to_string();
    // Keep standard output parseable when it already carries the data.
    if to_stdout {
        eprintln!("{line}");
    } else {
        println!("{line}");
    }
    Ok(())
}

fn run(cli: Cli, start: Instant) -> Result<(), CliError> {
    let cfg = resolve(&cli.common)?;
    let (name, outcome) = commands::dispatch(&cfg, cli.command)?;
    emit(&cfg, name, outcome, start)
}

fn main() -> ExitCode {
    let start = Instant::now();
    let cli = Cli::parse();
    match run(cli, start) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
