//! `sgnn`: train GNNs on sampled subgraphs, check gradients, benchmark
//! samplers and generate synthetic datasets.

mod bench;
mod gen;
mod gradcheck;
mod train;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Process exit codes.
const EXIT_ERROR: u8 = 1;
const EXIT_CHECK_FAILED: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "sgnn", version, about = "Graph-sampling based GNN training")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train a model on a dataset directory.
    Train(train::TrainArgs),
    /// Compare analytic gradients with finite differences.
    Gradcheck(gradcheck::GradcheckArgs),
    /// Time the samplers with 1..p parallel workers.
    SampleBench(bench::BenchArgs),
    /// Write a Kronecker dataset.
    Gen(gen::GenArgs),
}

/// Result of a subcommand that ran to completion.
pub enum Outcome {
    Success,
    CheckFailed,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_ERROR)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Train(a) => train::run(a),
        Command::Gradcheck(a) => gradcheck::run(a),
        Command::SampleBench(a) => bench::run(a),
        Command::Gen(a) => gen::run(a),
    };
    match result {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(e) => {
            let _ = writeln!(std::io::stderr(), "error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

/// Pretty JSON on stdout.
pub fn print_json<T: serde::Serialize>(value: &T) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}
