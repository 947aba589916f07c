//! `rga`: dataset statistics, sparsification, trust mining and comparative
//! evaluation over ternary trust files.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rga_core::eval::Method;

use config::{Flags, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "rga", version, about = "Sparse trust mining experiments")]
struct Cli {
    /// Key-value config file; flags override its settings. A run's
    /// manifest.txt is a valid config file.
    #[arg(long, global = true, env = "RGA_CONFIG")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Users, edges, sparsity degree and mean out-degree of each input
    Stats(Flags),
    /// Thin the input to a target sparsity degree
    Sparsify(Flags),
    /// Propagate trust and write the aggregated matrix
    Mine(Flags),
    /// Score RGA (or the given methods) on held-out statements
    Evaluate(Flags),
    /// Score RGA and the three baselines side by side
    Compare(Flags),
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let (name, flags) = match &cli.command {
        Command::Stats(f) => ("stats", f),
        Command::Sparsify(f) => ("sparsify", f),
        Command::Mine(f) => ("mine", f),
        Command::Evaluate(f) => ("evaluate", f),
        Command::Compare(f) => ("compare", f),
    };
    let cfg = RunConfig::resolve(cli.config.as_deref(), flags)?;
    match cli.command {
        Command::Stats(_) => commands::stats(&cfg),
        Command::Sparsify(_) => commands::sparsify_cmd(&cfg),
        Command::Mine(_) => commands::mine(&cfg),
        Command::Evaluate(_) => commands::evaluate(&cfg, name, vec![Method::Rga]),
        Command::Compare(_) => commands::evaluate(&cfg, name, Method::all()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
