//! `paee` batch runner: synthesize a dataset, run the LOSO grid, compute
//! statistics and render reports.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
    #[error("{0}")]
    IncompleteGrid(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::IncompleteGrid(_) => 4,
        }
    }

    pub fn io(path: &std::path::Path, e: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }
}

/// Outcome of a command that ran to the end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Complete,
    /// Some folds failed; the failure list was written.
    Partial,
}

#[derive(Parser, Debug)]
#[command(name = "paee", version, about = "PAEE estimation experiments")]
struct Cli {
    /// Log verbosity: error, warn, info, debug or trace.
    #[arg(long, global = true, default_value = "info")]
    log_level: log::LevelFilter,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct RunFlags {
    /// Comma-separated compositions, e.g. `3-acc,pelvis-acc`.
    #[arg(long)]
    pub compositions: Option<String>,
    /// Comma-separated models: `lr`, `cnn-lstm`.
    #[arg(long)]
    pub models: Option<String>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Use every n-th training window for the CNN-LSTM.
    #[arg(long)]
    pub train_stride: Option<usize>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Use the literal R² denominator (predictions about the truth mean).
    #[arg(long)]
    pub literal_r2: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic dataset tree.
    Synth {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Leave-one-subject-out evaluation over the selected grid.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Normality, ANOVA and pairwise tests on a complete results.csv.
    Stats {
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// SVG trace plots and the Mean (SD) summary table.
    Report {
        #[arg(long)]
        traces: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// synth, run, stats and report into one output directory.
    All {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
    },
}

fn dispatch(cmd: Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Synth { config, seed, out } => {
            commands::synth(config.as_deref(), seed, &out).map(|_| Outcome::Complete)
        }
        Command::Run {
            config,
            data,
            out,
            seed,
            flags,
        } => {
            let settings = commands::run_settings(config.as_deref(), seed, &flags)?;
            commands::run(&data, &out, &settings)
        }
        Command::Stats { results, out } => commands::stats(&results, &out).map(|_| Outcome::Complete),
        Command::Report { traces, out } => commands::report(&traces, &out).map(|_| Outcome::Complete),
        Command::All {
            config,
            seed,
            out,
            flags,
        } => commands::all(config.as_deref(), seed, &flags, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(2),
            };
        }
    };
    env_logger::Builder::new()
        .filter_level(cli.log_level)
        .format_timestamp(None)
        .init();
    match dispatch(cli.command) {
        Ok(Outcome::Complete) => ExitCode::SUCCESS,
        Ok(Outcome::Partial) => ExitCode::from(1),
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.code())
        }
    }
}
