//! `loomsim`: seeded flight-corridor simulation and trajectory analysis.
//!
//! Every command is a pure function of its inputs, flags and seed: rerunning
//! with the same arguments reproduces output files byte-identically. Exit
//! codes are stable for scripting: 0 success, 2 input or schema error,
//! 3 statistical-precondition error, 4 I/O error.

mod commands;
mod util;

use clap::{Parser, Subcommand};
use loomsim_core::Error;

#[derive(Parser)]
#[command(name = "loomsim", version, about = "Leader-follower flight simulation and trajectory-analysis toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize trajectory ensembles on a corridor scenario.
    Simulate(commands::simulate::SimulateArgs),
    /// Arc-length path statistics (mean path + covariance ellipses).
    Stats(commands::stats::StatsArgs),
    /// Leader/follower roles and pursuit-law classification.
    Classify(commands::classify::ClassifyArgs),
    /// Emergence-process analysis: sliding rate, goodness of fit, interval
    /// probabilities.
    Emergence(commands::emergence::EmergenceArgs),
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) => 4,
        Error::InsufficientData(_) => 3,
        _ => 2,
    }
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => commands::simulate::run(args),
        Command::Stats(args) => commands::stats::run(args),
        Command::Classify(args) => commands::classify::run(args),
        Command::Emergence(args) => commands::emergence::run(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err}");
        std::process::exit(exit_code(&err));
    }
}
