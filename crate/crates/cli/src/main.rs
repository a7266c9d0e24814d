//! Command-line driver for the analogue gate simulator.
//!
//! `memgate <sweep|surface|energy|texel|digitize> --config <file> [--out <dir>] [--svg]`
//!
//! Exit codes: 0 on success, 1 for configuration or solver errors, 2 for
//! output I/O errors.

mod commands;
mod config;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Emitter;
use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] memgate_core::Error),
    #[error("i/o failure at {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Core(_) => 1,
            CliError::Io { .. } => 2,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "memgate",
    version,
    about = "Deterministic experiments on memristor-enhanced analogue logic gates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inverter transfer sweeps, one CSV per programmed state pair.
    Sweep(RunArgs),
    /// Fuzzy NAND surface with its single-input reductions.
    Surface(RunArgs),
    /// Charge and energy report of the equivalent divider model.
    Energy(RunArgs),
    /// Spike template-matching experiment on the texel array.
    Texel(RunArgs),
    /// Analogue inverter driving the current read-out stage.
    Digitize(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output_dir` from the configuration).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit SVG plots alongside the CSV outputs.
    #[arg(long)]
    svg: bool,
}

fn run(command: Command) -> Result<(), CliError> {
    let args = match &command {
        Command::Sweep(a)
        | Command::Surface(a)
        | Command::Energy(a)
        | Command::Texel(a)
        | Command::Digitize(a) => a,
    };
    let config = RunConfig::load(&args.config)?;
    let dir = args
        .out
        .clone()
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let emitter = Emitter::new(dir);
    let emit_svg = args.svg || config.emit_svg;
    match &command {
        Command::Sweep(_) => commands::cmd_sweep(&config, &emitter, emit_svg),
        Command::Surface(_) => commands::cmd_surface(&config, &emitter, emit_svg),
        Command::Energy(_) => commands::cmd_energy(&config, &emitter, emit_svg),
        Command::Texel(_) => commands::cmd_texel(&config, &args.config, &emitter, emit_svg),
        Command::Digitize(_) => commands::cmd_digitize(&config, &emitter, emit_svg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
