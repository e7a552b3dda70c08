//! Reproducible experiment runner: validated configurations, per-trial
//! tables, summaries with provenance, manifests and byte-for-byte replay.

pub mod artifacts;
pub mod config;
pub mod error;
pub mod experiments;
pub mod manifest;
pub mod run;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::config::{Command, ExperimentConfig, Format};
use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "thresholdlab", version, about = "Threshold and large-deviation experiments on monotone families")]
pub struct Cli {
    /// Master seed; required by randomized subcommands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Trial count; each randomized subcommand has its own default.
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Worker threads. Results do not depend on this.
    #[arg(long, global = true, env = "THRESHOLDLAB_THREADS")]
    pub threads: Option<usize>,
    /// Output directory [default: out].
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Format of the per-trial table.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub action: Action,
}

#[derive(Subcommand, Debug)]
pub enum Action {
    #[command(flatten)]
    Experiment(Command),
    /// Run an experiment from a JSON configuration file.
    Run { config: PathBuf },
    /// Re-run a completed experiment and compare its data files byte for byte.
    Replay { manifest: PathBuf },
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.action {
        Action::Replay { manifest } => {
            let report = run::replay(&manifest, cli.threads)?;
            println!(
                "replay: {} data files identical (recorded status {})",
                report.files_compared, report.recorded_status
            );
            Ok(0)
        }
        action => {
            let mut config = match action {
                Action::Run { config } => {
                    let text = std::fs::read_to_string(&config).map_err(|e| CliError::io(&config, e))?;
                    ExperimentConfig::from_json(&text)?
                }
                Action::Experiment(command) => ExperimentConfig::from_command(
                    command,
                    cli.seed,
                    cli.trials,
                    cli.format.unwrap_or_default(),
                    &cli.out.clone().unwrap_or_else(|| PathBuf::from("out")),
                )?,
                Action::Replay { .. } => unreachable!(),
            };
            if let Some(out) = &cli.out {
                config.output_path = out.to_string_lossy().into_owned();
            }
            let result = run::run(&config, cli.threads)?;
            println!(
                "{}: {} ({})",
                config.subcommand,
                result.status.as_str(),
                result.dir.join(artifacts::SUMMARY_FILE).display()
            );
            Ok(result.status.exit_code())
        }
    }
}

/// Parses `args` (including the program name) and runs; returns the exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 4 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
