//! `hysnarx`: identification and compensation pipelines for hysteretic
//! plants, one file-producing stage per subcommand.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hysnarx::ErrorClass;

mod commands;
mod manifest;

#[derive(Parser, Debug)]
#[command(
    name = "hysnarx",
    version,
    about = "NARX identification and hysteresis compensation"
)]
struct Cli {
    /// Experiment configuration (TOML). Built-in defaults apply without it,
    /// but plant commands need a `[plant]` section.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Noise seed; overrides `simulation.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Directory for produced files and `manifest.json`.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum PlantSignal {
    /// Filtered-noise excitation from `[excitation]`.
    Training,
    /// Sinusoid from `[validation]`.
    Validation,
    /// Sinusoid from `[compensation.reference]`, uncompensated.
    Reference,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    /// Invert the identified direct model.
    Direct,
    /// Evaluate the identified inverse model.
    Inverse,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write the filtered-noise excitation on the integration grid as `excitation.csv`.
    Excite {
        /// Record length in seconds; overrides `simulation.duration`.
        #[arg(long)]
        duration: Option<f64>,
    },
    /// Drive the Bouc-Wen plant and write a `time_s,u,y` dataset.
    SimulatePlant {
        /// Built-in input to use when `--input` is absent.
        #[arg(long, value_enum, default_value_t = PlantSignal::Training)]
        signal: PlantSignal,
        /// Input record (`time_s,u` or `time_s,u,y`) to replay instead.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Record length in seconds for built-in inputs.
        #[arg(long)]
        duration: Option<f64>,
        /// Output file stem; defaults to the signal name or `plant`.
        #[arg(long)]
        name: Option<String>,
    },
    /// Identify a direct or inverse NARX model from a dataset.
    Identify {
        /// Dataset with columns `time_s,u,y`.
        #[arg(long)]
        data: PathBuf,
        /// Identify the inverse model (plant output to plant input).
        #[arg(long)]
        inverse: bool,
        /// Lead of the inverse model in samples; overrides `inverse.tau_s`.
        #[arg(long, requires = "inverse")]
        tau_s: Option<usize>,
        /// Estimate without the steady-state continuum constraint.
        #[arg(long)]
        no_constraint: bool,
        /// Dataset on which to report the model's free-run MAPE.
        #[arg(long)]
        validate: Option<PathBuf>,
    },
    /// Quasi-static loading and unloading branches of a model.
    Analyze {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        u_min: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        u_max: Option<f64>,
        /// Number of grid points.
        #[arg(long)]
        grid: Option<usize>,
        /// Increment magnitude; defaults to the mean increment of the validation sinusoid.
        #[arg(long)]
        phi1: Option<f64>,
        /// Dataset whose input drives a free run written as `free_run.csv`.
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Build a compensation law from a model.
    Synthesize {
        #[arg(long)]
        model: PathBuf,
        /// Defaults to `compensation.strategy`.
        #[arg(long, value_enum)]
        strategy: Option<StrategyArg>,
    },
    /// Run a law (or no compensation) against the plant and score the tracking.
    Compensate {
        #[arg(long, required_unless_present = "no_compensation")]
        law: Option<PathBuf>,
        /// Feed the reference straight to the plant.
        #[arg(long, conflicts_with = "law")]
        no_compensation: bool,
        /// Reference record (`time_s,u` or `time_s,u,y`, `u` is used);
        /// defaults to `[compensation.reference]`.
        #[arg(long)]
        reference: Option<PathBuf>,
    },
    /// Model and tracking MAPE as a function of the sampling time.
    SweepSampling {
        /// Comma-separated sampling times in seconds; overrides `sampling_sweep.sample_times`.
        #[arg(long, value_delimiter = ',')]
        sample_times: Option<Vec<f64>>,
    },
    /// Run the whole benchmark and summarize it in `report.txt`.
    Report {
        /// Leave out the beta sweep.
        #[arg(long)]
        no_beta_sweep: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Excite { .. } => "excite",
            Command::SimulatePlant { .. } => "simulate-plant",
            Command::Identify { .. } => "identify",
            Command::Analyze { .. } => "analyze",
            Command::Synthesize { .. } => "synthesize",
            Command::Compensate { .. } => "compensate",
            Command::SweepSampling { .. } => "sweep-sampling",
            Command::Report { .. } => "report",
        }
    }
}

/// A failure with its exit class and the steps that led to it.
#[derive(Debug)]
pub struct CliError {
    pub class: ErrorClass,
    pub message: String,
    pub context: Vec<String>,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError {
            class: ErrorClass::Config,
            message: message.into(),
            context: Vec::new(),
        }
    }
}

impl From<hysnarx::Error> for CliError {
    fn from(e: hysnarx::Error) -> Self {
        CliError {
            class: e.class(),
            message: e.to_string(),
            context: Vec::new(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        hysnarx::Error::from(e).into()
    }
}

pub trait Context<T> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T, CliError>;
}

impl<T, E: Into<CliError>> Context<T> for Result<T, E> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T, CliError> {
        self.map_err(|e| {
            let mut e = e.into();
            e.context.push(what());
            e
        })
    }
}

fn code(class: ErrorClass) -> (&'static str, u8) {
    match class {
        ErrorClass::Config => ("config", 2),
        ErrorClass::Numeric => ("numeric", 3),
        ErrorClass::Structural => ("structural", 4),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    match commands::run(cli.command, cli.config, cli.seed, cli.out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (label, exit) = code(e.class);
            eprintln!("error: code={label} exit={exit} command={name}");
            for c in e.context.iter().rev() {
                eprintln!("  while {c}");
            }
            eprintln!("  {}", e.message);
            ExitCode::from(exit)
        }
    }
}
