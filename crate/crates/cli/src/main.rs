//! `reorg`: estimates, design sweeps, chain simulation, and chain health
//! from the command line.

mod args;
mod commands;
mod error;
mod manifest;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "reorg", version, about = "Malicious-reorg analysis for Tezos-style proof of stake")]
struct Cli {
    /// Worker threads (default: available parallelism). Results do not
    /// depend on this.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate the probability of a feasible or profitable attack, or the
    /// mean cost of feasible attacks.
    Estimate(commands::estimate::EstimateArgs),
    /// Evaluate the design objective over a grid of protocol parameters.
    Sweep(commands::sweep::SweepArgs),
    /// Simulate a chain with an attacker that executes reorgs.
    Simulate(commands::simulate::SimulateArgs),
    /// Compute the health of every block of a recorded chain.
    Health(commands::health::HealthArgs),
    /// Compare candidate designs against the optimum of a sweep.
    Compare(commands::compare::CompareArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(err) = rayon::ThreadPoolBuilder::new().num_threads(usize::from(threads)).build_global() {
            eprintln!("error: cannot start {threads} worker threads: {err}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Estimate(a) => commands::estimate::run(a),
        Command::Sweep(a) => commands::sweep::run(a),
        Command::Simulate(a) => commands::simulate::run(a),
        Command::Health(a) => commands::health::run(a),
        Command::Compare(a) => commands::compare::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
