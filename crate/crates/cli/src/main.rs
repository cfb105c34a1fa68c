//! `gmrf`: sparse Gaussian graphical model estimation from the command line.
//!
//! Exit codes: 0 success, 1 bad input or I/O failure, 2 a solve stopped
//! before reaching the requested duality gap.

mod classify;
mod evaluate;
mod input;
mod solve;
mod sweep;
mod synth;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "gmrf", version, about = "Sparse inverse covariance estimation by projected gradient on the dual")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit one sparse precision matrix.
    Solve(solve::Args),
    /// Fit over a λ grid and score each fit on held-out data.
    Sweep(sweep::Args),
    /// Generate a random sparse model, samples, and a train/test split.
    Synth(synth::Args),
    /// Score a precision matrix on test data and against a true edge set.
    Evaluate(evaluate::Args),
    /// Assign each labeled sample to the most likely class model.
    Classify(classify::Args),
}

/// What a command wants the process to report.
pub enum Status {
    Ok,
    NotConverged,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => solve::run(a),
        Command::Sweep(a) => sweep::run(a),
        Command::Synth(a) => synth::run(a),
        Command::Evaluate(a) => evaluate::run(a),
        Command::Classify(a) => classify::run(a),
    };
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::NotConverged) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
