use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use clap::Args;
use reorg_core::health::{health_trace, read_chain, DEFAULT_WINDOW};
use reorg_core::{ChainHistory, ProtocolParams};
use serde::Serialize;

use super::estimate::display;
use crate::args;
use crate::error::{CliError, CliResult};
use crate::manifest::Run;
use crate::output::{self, num};

#[derive(Debug, Args, Serialize)]
pub struct HealthArgs {
    /// Chain records, one JSON object per line.
    #[arg(long)]
    pub chain: PathBuf,
    #[arg(long, default_value_t = DEFAULT_WINDOW as u32)]
    pub window: u32,
    #[arg(long, default_value = "24,8,40", value_parser = args::params)]
    #[serde(serialize_with = "display")]
    pub params: ProtocolParams,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(a: HealthArgs) -> CliResult {
    let run = Run::start("health");
    if a.window < 2 {
        return Err(CliError::Usage(format!("--window must be at least 2, got {}", a.window)));
    }
    let file = File::open(&a.chain).map_err(|e| CliError::Runtime(format!("{}: {e}", a.chain.display())))?;
    let records = read_chain(BufReader::new(file))?;
    let hist = ChainHistory::new(records, a.window as usize)?;

    let mut w = csv::Writer::from_writer(output::open(a.out.as_deref())?);
    w.write_record(["slot", "health"])?;
    for (slot, h) in health_trace(&a.params, &hist) {
        w.write_record([slot.to_string(), num(h)])?;
    }
    w.flush()?;
    drop(w);
    run.finish(&a, None, a.out.as_deref(), &[])
}
