use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qjet::data::DatasetConfig;
use qjet::runner::{self, RunError};

#[derive(Parser)]
#[command(name = "qjet", version, about = "Quark/gluon jet tagging with classical and quantum graph networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a JSONL jet file and write a featurized cache.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 10)]
        min_particles: usize,
        /// Wrap azimuthal differences into (-π, π] when computing ΔR.
        #[arg(long)]
        wrap_phi: bool,
    },
    /// Generate synthetic jets (JSONL, or a cache if OUTPUT ends in .cache).
    Synth {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Train one model from a config file.
    Train {
        #[arg(long)]
        config: PathBuf,
    },
    /// Evaluate a checkpoint on a data file.
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Defaults to config.txt beside the checkpoint.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Train every config in a directory and tabulate AUC against |Θ|.
    Sweep {
        #[arg(long)]
        configs: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Run configs concurrently.
        #[arg(long)]
        parallel: bool,
        /// First write one config per model and target size, using the
        /// given base config for the shared keys.
        #[arg(long)]
        generate: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), RunError> {
    match cli.command {
        Command::Ingest { input, output, min_particles, wrap_phi } => {
            let cfg = DatasetConfig { min_particles, wrap_phi, ..DatasetConfig::default() };
            runner::cmd_ingest(&input, &output, &cfg)?;
        }
        Command::Synth { n, seed, output } => {
            runner::cmd_synth(n, seed, &output)?;
        }
        Command::Train { config } => {
            runner::cmd_train(&config)?;
        }
        Command::Eval { checkpoint, data, config } => {
            runner::cmd_eval(&checkpoint, &data, config.as_deref())?;
        }
        Command::Sweep { configs, output, parallel, generate } => {
            if let Some(base) = generate {
                let text = std::fs::read_to_string(&base).map_err(|e| RunError::Validation(format!("cannot read {}: {e}", base.display())))?;
                let shared: String = text.lines().filter(|l| !l.trim_start().starts_with("model") && !l.trim_start().starts_with("target_params")).map(|l| format!("{l}\n")).collect();
                runner::generate_sweep_configs(&configs, &shared)?;
            }
            runner::cmd_sweep(&configs, output.as_deref(), parallel)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
