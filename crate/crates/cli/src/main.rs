//! `opcfit`: simulate saccades, find them in gaze recordings, fit
//! oculomotor plant parameters to each one, and benchmark the fit
//! pipeline across worker counts.

mod commands;

use clap::{Args, Parser, Subcommand};
use opcfit_core::{
    DEFAULT_IVT_THRESHOLD, DEFAULT_MIN_AMPLITUDE_DEG, DEFAULT_MIN_DURATION_MS, MODEL_18,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "opcfit",
    version,
    about = "Saccade simulation and oculomotor plant parameter estimation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one saccade and write its trajectory CSV.
    Simulate(SimulateArgs),
    /// Detect saccades in a gaze recording and write an inventory CSV.
    Detect(DetectArgs),
    /// Fit plant parameters to every detected saccade.
    Estimate(EstimateArgs),
    /// Time the fit pipeline across worker counts.
    Bench(BenchArgs),
}

#[derive(Args)]
pub(crate) struct SimulateArgs {
    /// Plant model to simulate.
    #[arg(long, default_value = MODEL_18)]
    pub(crate) model: String,
    /// Parameter override as NAME=VALUE; repeatable.
    #[arg(long = "set", value_name = "NAME=VALUE")]
    pub(crate) set: Vec<String>,
    /// Saccade duration, ms.
    #[arg(long, default_value_t = 46.0)]
    pub(crate) duration: f64,
    /// Saccade amplitude, degrees; the sign sets the direction.
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    pub(crate) amplitude: f64,
    /// Sample interval, ms.
    #[arg(long, default_value_t = 1.0)]
    pub(crate) dt: f64,
    /// Starting eye position, degrees.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub(crate) initial_theta: f64,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub(crate) out: Option<PathBuf>,
}

#[derive(Args)]
pub(crate) struct DetectArgs {
    /// Gaze recording CSV (timestamp_ms,position_deg,valid).
    pub(crate) input: PathBuf,
    /// Velocity threshold separating saccade from fixation samples, deg/s.
    #[arg(long, default_value_t = DEFAULT_IVT_THRESHOLD)]
    pub(crate) ivt_threshold: f64,
    /// Discard saccades smaller than this amplitude, degrees.
    #[arg(long, default_value_t = DEFAULT_MIN_AMPLITUDE_DEG)]
    pub(crate) min_amplitude: f64,
    /// Discard saccades shorter than this duration, ms.
    #[arg(long, default_value_t = DEFAULT_MIN_DURATION_MS)]
    pub(crate) min_duration: f64,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub(crate) out: Option<PathBuf>,
}

#[derive(Args)]
pub(crate) struct EstimateArgs {
    /// Gaze recording CSVs; saccades are numbered across files in order.
    #[arg(required = true)]
    pub(crate) inputs: Vec<PathBuf>,
    /// Plant model to fit.
    #[arg(long, default_value = MODEL_18)]
    pub(crate) model: String,
    /// Worker threads for the batch.
    #[arg(long, default_value_t = 1)]
    pub(crate) workers: usize,
    /// Velocity threshold separating saccade from fixation samples, deg/s.
    #[arg(long, default_value_t = DEFAULT_IVT_THRESHOLD)]
    pub(crate) ivt_threshold: f64,
    /// Discard saccades smaller than this amplitude, degrees.
    #[arg(long, default_value_t = DEFAULT_MIN_AMPLITUDE_DEG)]
    pub(crate) min_amplitude: f64,
    /// Discard saccades shorter than this duration, ms.
    #[arg(long, default_value_t = DEFAULT_MIN_DURATION_MS)]
    pub(crate) min_duration: f64,
    /// Convergence tolerance on parameter coordinates.
    #[arg(long, default_value_t = 1e-4)]
    pub(crate) tol_x: f64,
    /// Convergence tolerance on objective values.
    #[arg(long, default_value_t = 1e-4)]
    pub(crate) tol_f: f64,
    /// Iteration cap per saccade; defaults to a dimension-scaled cap.
    #[arg(long)]
    pub(crate) max_iters: Option<usize>,
    /// Wall-clock budget per saccade, seconds.
    #[arg(long, default_value_t = 10.0)]
    pub(crate) time_budget: f64,
    /// Results CSV path. The summary goes to standard output.
    #[arg(long)]
    pub(crate) out: PathBuf,
}

#[derive(Args)]
pub(crate) struct BenchArgs {
    /// Gaze recording CSVs to use as the workload.
    pub(crate) inputs: Vec<PathBuf>,
    /// Generate N synthetic saccades as the workload instead of files.
    #[arg(long, value_name = "N", conflicts_with = "inputs")]
    pub(crate) synthetic: Option<usize>,
    /// Plant model to fit.
    #[arg(long, default_value = MODEL_18)]
    pub(crate) model: String,
    /// Worker counts to time, comma separated; the first is the baseline.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
    pub(crate) workers: Vec<usize>,
    /// Synthetic workload amplitude, degrees.
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    pub(crate) amplitude: f64,
    /// Synthetic workload duration, ms.
    #[arg(long, default_value_t = 46.0)]
    pub(crate) duration: f64,
    /// Synthetic workload sample interval, ms.
    #[arg(long, default_value_t = 1.0)]
    pub(crate) dt: f64,
    /// Velocity threshold separating saccade from fixation samples, deg/s.
    #[arg(long, default_value_t = DEFAULT_IVT_THRESHOLD)]
    pub(crate) ivt_threshold: f64,
    /// Discard saccades smaller than this amplitude, degrees.
    #[arg(long, default_value_t = DEFAULT_MIN_AMPLITUDE_DEG)]
    pub(crate) min_amplitude: f64,
    /// Discard saccades shorter than this duration, ms.
    #[arg(long, default_value_t = DEFAULT_MIN_DURATION_MS)]
    pub(crate) min_duration: f64,
    /// Convergence tolerance on parameter coordinates.
    #[arg(long, default_value_t = 1e-4)]
    pub(crate) tol_x: f64,
    /// Convergence tolerance on objective values.
    #[arg(long, default_value_t = 1e-4)]
    pub(crate) tol_f: f64,
    /// Iteration cap per saccade; defaults to a dimension-scaled cap.
    #[arg(long)]
    pub(crate) max_iters: Option<usize>,
    /// Wall-clock budget per saccade, seconds.
    #[arg(long, default_value_t = 10.0)]
    pub(crate) time_budget: f64,
    /// Benchmark CSV path; the text table always goes to standard output.
    #[arg(long)]
    pub(crate) out: Option<PathBuf>,
}

/// Command failure carrying its process exit code: 1 for I/O and file
/// content problems, 2 for bad arguments, 3 for an empty pipeline.
#[derive(Debug)]
pub(crate) enum CliError {
    Io(String),
    InvalidArgument(String),
    EmptyPipeline(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::InvalidArgument(_) => 2,
            CliError::EmptyPipeline(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Io(m) | CliError::InvalidArgument(m) | CliError::EmptyPipeline(m) => m,
        }
    }
}

impl From<opcfit_core::Error> for CliError {
    fn from(e: opcfit_core::Error) -> Self {
        use opcfit_core::Error as E;
        match &e {
            E::Io(_) | E::Parse { .. } | E::Format(_) | E::Schema(_) | E::Validation { .. } => {
                CliError::Io(e.to_string())
            }
            _ => CliError::InvalidArgument(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => commands::cmd_simulate(&args),
        Command::Detect(args) => commands::cmd_detect(&args),
        Command::Estimate(args) => commands::cmd_estimate(&args),
        Command::Bench(args) => commands::cmd_bench(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
