//! `metldpc` command-line front end: build codes, run density analysis,
//! build scaling-coefficient tables and run frame-error sweeps.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage or validation error.
//! Every subcommand reads and validates all of its inputs before the output
//! directory is touched, so a rejected run leaves no partial artifacts.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "metldpc", version, about = "MET-LDPC construction, LUT generation and FER simulation")]
pub struct Cli {
    /// Seed for lifting shifts, K-means, Monte Carlo analysis and channel noise.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Directory receiving all outputs; created if missing.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    /// Manifest path; defaults to `<out-dir>/<stem>.<subcommand>.manifest.json`.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lift a protograph and export the code and its degree statistics.
    BuildCode(BuildCodeArgs),
    /// Run PEXIT (or Monte Carlo) density evolution and export the schedule.
    Analyze(AnalyzeArgs),
    /// Build, compress and export a scaling-coefficient LUT.
    BuildLut(BuildLutArgs),
    /// Estimate frame error rates over a list of channel points.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct BuildCodeArgs {
    #[arg(long)]
    pub proto: PathBuf,
    /// Lifting factor.
    #[arg(long)]
    pub z: usize,
    /// Shift re-draws allowed per proto-edge to avoid 4-cycles (0 disables).
    #[arg(long, default_value_t = 0)]
    pub girth_retries: u32,
    /// Output stem; defaults to the protograph name.
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub proto: PathBuf,
    /// Channel point, E_s/N_0 in dB.
    #[arg(long, allow_hyphen_values = true)]
    pub esn0_db: f64,
    #[arg(long, default_value_t = 500)]
    pub iterations: usize,
    /// `pexit` (Gaussian approximation) or `mc` (sampled histograms).
    #[arg(long, default_value = "pexit")]
    pub mode: String,
    /// Population size per proto-edge in `mc` mode.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Args)]
pub struct BuildLutArgs {
    #[arg(long)]
    pub proto: PathBuf,
    /// Density schedule from `analyze`; without it PEXIT runs at `--esn0-db`.
    #[arg(long)]
    pub schedule: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub esn0_db: Option<f64>,
    /// Table depth T; defaults to the schedule length (or 500).
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Quantization levels Q.
    #[arg(long, default_value_t = 32)]
    pub levels: usize,
    /// K-means clusters K.
    #[arg(long, default_value_t = 81)]
    pub clusters: usize,
    /// `channel`, `message` or `uniform:<max>`.
    #[arg(long, default_value = "channel")]
    pub grid: String,
    /// `normalized` or `paper-literal`.
    #[arg(long, default_value = "normalized")]
    pub normalization: String,
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Code file written by `build-code`.
    #[arg(long)]
    pub code: PathBuf,
    /// `spa`, `msa` or `idmsa`.
    #[arg(long)]
    pub decoder: String,
    #[arg(long, default_value_t = 0.75)]
    pub msa_factor: f64,
    /// LUT file, required for `idmsa`.
    #[arg(long)]
    pub lut: Option<PathBuf>,
    /// Comma-separated E_s/N_0 points in dB.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    pub esn0_db: Vec<f64>,
    /// `start:stop:step` in dB, inclusive of `stop` up to rounding.
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<String>,
    #[arg(long, default_value_t = 500)]
    pub max_iterations: usize,
    #[arg(long, default_value_t = 100_000)]
    pub max_frames: u64,
    #[arg(long, default_value_t = 50)]
    pub target_errors: u64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, default_value_t = 64)]
    pub batch_size: usize,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or invalid input content; exit code 2.
    Usage(String),
    /// Failure while computing or writing; exit code 1.
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        Self::Runtime(e)
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            // clap reports help and version with 0, misuse with 2
            return ExitCode::from(code as u8);
        }
    };
    match commands::run(&cli) {
        Ok(outputs) => {
            for p in outputs {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
