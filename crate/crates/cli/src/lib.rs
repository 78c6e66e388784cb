//! The `tfzak` command line: transforms, norms, the verification suite and
//! plot-data reports.

pub mod checks;
pub mod commands;
pub mod config;
pub mod manifest;
pub mod output;
pub mod signals;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::checks::CheckKind;
use crate::config::{ExperimentConfig, TransformKind};

pub const DEFAULT_OUT: &str = "tfzak-out";

#[derive(Debug, Parser)]
#[command(name = "tfzak", version, about = "Zak transform, STFT and mixed-norm toolkit")]
pub struct Cli {
    /// JSON run configuration; flags override its keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = "TFZAK_OUT")]
    pub out: Option<PathBuf>,
    /// Size of the worker pool.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a transform and write the field container and a CSV export.
    Transform(TransformArgs),
    /// Evaluate the configured norm on a signal or a family.
    Norm(NormArgs),
    /// Run one check, or the whole suite with `all`.
    Verify(VerifyArgs),
    /// Collect plot data from earlier runs.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[arg(long, value_enum)]
    pub kind: Option<TransformKind>,
    /// gaussian, hermite, trig, indicator, delta, ones or random.
    #[arg(long)]
    pub signal: Option<String>,
    /// Finite Zak: signal length.
    #[arg(long = "L")]
    pub length: Option<usize>,
    /// Finite Zak: number of rows.
    #[arg(long = "M")]
    pub rows: Option<usize>,
    /// Coefficients: largest |m| kept.
    #[arg(long)]
    pub cutoff: Option<i64>,
}

#[derive(Debug, Args)]
pub struct NormArgs {
    /// Norm spec as inline JSON.
    #[arg(long)]
    pub spec: Option<String>,
    #[arg(long)]
    pub signal: Option<String>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub kind: Option<CheckKind>,
    /// Smaller parameter grids and families.
    #[arg(long)]
    pub quick: bool,
    /// Corrupt the measured field of an identity check by this amount.
    #[arg(long)]
    pub plant_defect: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Manifests to read; by default every run under the output directory.
    #[arg(long)]
    pub manifest: Vec<PathBuf>,
}

/// How a command ended: the process exit code and an optional message.
#[derive(Debug)]
pub struct Exit {
    pub code: i32,
    pub message: Option<String>,
}

impl Exit {
    pub const OK: i32 = 0;
    pub const FAILED: i32 = 1;
    pub const USAGE: i32 = 2;

    pub fn ok() -> Self {
        Self { code: Self::OK, message: None }
    }

    pub fn failed(msg: impl Into<String>) -> Self {
        Self { code: Self::FAILED, message: Some(msg.into()) }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        Self { code: Self::USAGE, message: Some(msg.into()) }
    }
}

impl From<anyhow::Error> for Exit {
    fn from(e: anyhow::Error) -> Self {
        Exit::usage(format!("{e:#}"))
    }
}

/// The loaded config with global flags applied, and the output directory.
#[derive(Debug)]
pub struct Session {
    pub config: ExperimentConfig,
    pub out: PathBuf,
}

impl Session {
    pub fn new(cli: &Cli) -> Result<Self, Exit> {
        let mut config = match &cli.config {
            Some(p) => ExperimentConfig::load(p).map_err(|e| Exit::usage(e.0))?,
            None => ExperimentConfig::default(),
        };
        if let Some(s) = cli.seed {
            config.seed = s;
        }
        let out = cli.out.clone().or_else(|| config.out_dir.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
        Ok(Self { config, out })
    }
}

pub fn run(cli: Cli) -> Exit {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Exit::usage("--threads must be at least 1");
        }
        // Fails only if a pool already exists, as in repeated in-process runs.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let session = match Session::new(&cli) {
        Ok(s) => s,
        Err(e) => return e,
    };
    let result = match &cli.command {
        Command::Transform(a) => commands::transform::run(session, a),
        Command::Norm(a) => commands::norm::run(session, a),
        Command::Verify(a) => commands::verify::run(session, a),
        Command::Report(a) => commands::report::run(session, a),
    };
    result.unwrap_or_else(|e| e)
}
