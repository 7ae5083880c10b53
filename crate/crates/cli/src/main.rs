mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{FileConfig, CONFIG_KEYS_HELP};

/// Two-view facial expression pipeline: synthesize auxiliary views, build
/// balanced embedding sets, train and evaluate the attention fusion network,
/// and smooth frame predictions.
#[derive(Debug, Parser)]
#[command(name = "viewfuse", version, after_help = CONFIG_KEYS_HELP)]
struct Cli {
    /// TOML config file; flags override its values
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Worker threads for parallel stages (synthesize)
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Crop and stack facial regions into auxiliary view images
    Synthesize(commands::synthesize::Args),
    /// Draw a class-balanced subset of an embedding file
    Sample(commands::sample::Args),
    /// Train the fusion network on paired embeddings
    TrainFusion(commands::train::Args),
    /// Run a checkpoint over paired embeddings and write predictions
    Evaluate(commands::evaluate::Args),
    /// Smooth a prediction stream with a sliding window
    Smooth(commands::smooth::Args),
    /// Score a prediction stream and print the metric table
    Report(commands::report::Args),
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let file_cfg = FileConfig::load(cli.config.as_ref())?;
    let threads = cli.threads.or(file_cfg.threads);
    match cli.command {
        Command::Synthesize(args) => commands::synthesize::run(args, &file_cfg, threads),
        Command::Sample(args) => commands::sample::run(args, &file_cfg),
        Command::TrainFusion(args) => commands::train::run(args, &file_cfg),
        Command::Evaluate(args) => commands::evaluate::run(args),
        Command::Smooth(args) => commands::smooth::run(args, &file_cfg),
        Command::Report(args) => commands::report::run(args),
    }
}

fn main() -> ExitCode {
    // Clap handles usage errors itself with exit code 2.
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
