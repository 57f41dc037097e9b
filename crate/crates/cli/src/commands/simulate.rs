use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::Args;
use reorg_core::health::{simulate_chain, write_chain, write_events, SimulationConfig, DEFAULT_WINDOW};
use reorg_core::ProtocolParams;
use serde::Serialize;

use super::estimate::display;
use crate::args;
use crate::error::CliResult;
use crate::manifest::Run;
use crate::output::{self, num};

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    /// Attacker stake fraction, in [0, 0.5); 0 simulates no attacker.
    #[arg(long, value_parser = args::stake_or_zero)]
    pub alpha: f64,
    /// Shortest reorg the attacker bothers with.
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    pub min_attack: u32,
    /// Longest reorg considered (default: one below the window).
    #[arg(long)]
    pub max_attack: Option<u32>,
    /// Final chain length, genesis included.
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    pub blocks: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "24,8,40", value_parser = args::params)]
    #[serde(serialize_with = "display")]
    pub params: ProtocolParams,
    /// Window of security for the health trace.
    #[arg(long, default_value_t = DEFAULT_WINDOW as u32)]
    pub window: u32,
    /// Chain records (JSON lines); standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Attack events (JSON lines).
    #[arg(long)]
    pub events: Option<PathBuf>,
    /// Health after every published block, as CSV slot,health,under_attack.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Serialize)]
struct Resolved<'a> {
    #[serde(flatten)]
    args: &'a SimulateArgs,
    max_attack_used: usize,
    attacks: usize,
}

pub fn run(a: SimulateArgs) -> CliResult {
    let run = Run::start("simulate");
    let window = a.window as usize;
    let cfg = SimulationConfig {
        alpha: a.alpha,
        seed: a.seed,
        blocks: a.blocks as usize,
        min_attack: a.min_attack as usize,
        max_attack: a.max_attack.map_or(window.saturating_sub(1), |m| m as usize),
        window,
    };
    let sim = simulate_chain(&a.params, &cfg)?;

    write_chain(output::open(a.out.as_deref())?, sim.history.records())?;
    if let Some(path) = &a.events {
        write_events(BufWriter::new(File::create(path)?), &sim.events)?;
    }
    if let Some(path) = &a.trace {
        write_trace(path, &sim.trace)?;
    }
    let extra: Vec<&Path> = a.events.iter().chain(a.trace.iter()).map(PathBuf::as_path).collect();
    let resolved = Resolved {
        args: &a,
        max_attack_used: cfg.max_attack,
        attacks: sim.events.len(),
    };
    run.finish(&resolved, Some(a.seed), a.out.as_deref(), &extra)
}

fn write_trace(path: &Path, trace: &[reorg_core::health::TracePoint]) -> CliResult {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record(["slot", "health", "under_attack"])?;
    for t in trace {
        w.write_record([t.slot.to_string(), num(t.health), u8::from(t.under_attack).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

