use std::path::PathBuf;

use clap::Args;
use reorg_core::sweep::{compare_designs, CellEstimate, SweepCell};
use serde::{Deserialize, Serialize};

use crate::args::{self, DesignList, WeightList};
use crate::error::{CliError, CliResult};
use crate::manifest::Run;
use crate::output::{self, num};

#[derive(Debug, Args, Serialize)]
pub struct CompareArgs {
    /// CSV written by `sweep`.
    #[arg(long)]
    pub from: PathBuf,
    /// Designs to rank, as "EI,DE,DP;EI,DE,DP".
    #[arg(long, value_parser = args::designs)]
    pub candidates: DesignList,
    /// Weights as LO:HI:STEP or a comma list.
    #[arg(long, default_value = "0.1:0.9:0.1", value_parser = args::weight_list)]
    pub beta_list: WeightList,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
struct Row {
    ei: u32,
    de: u64,
    dp: u64,
    o1: f64,
    o1_lo: f64,
    o1_hi: f64,
    o2: f64,
    o2_lo: f64,
    o2_hi: f64,
}

pub fn run(a: CompareArgs) -> CliResult {
    let run = Run::start("compare");
    let candidates = &a.candidates.0;
    if candidates.is_empty() {
        return Err(CliError::Usage("--candidates lists no designs".into()));
    }
    let mut reader = csv::Reader::from_path(&a.from).map_err(|e| CliError::Runtime(format!("{}: {e}", a.from.display())))?;
    let mut cells = Vec::new();
    for row in reader.deserialize() {
        let r: Row = row?;
        cells.push(SweepCell::new(
            (r.ei, r.de, r.dp),
            CellEstimate::from_values(r.o1, r.o1_lo, r.o1_hi),
            CellEstimate::from_values(r.o2, r.o2_lo, r.o2_hi),
            0.0,
        ));
    }
    let report = compare_designs(&cells, candidates, &a.beta_list.0)?;

    let mut w = csv::Writer::from_writer(output::open(a.out.as_deref())?);
    w.write_record(["beta", "candidate", "ratio"])?;
    for c in &report {
        let (ei, de, dp) = c.candidate;
        w.write_record([num(c.beta), format!("{ei},{de},{dp}"), num(c.ratio)])?;
    }
    w.flush()?;
    drop(w);
    run.finish(&a, None, a.out.as_deref(), &[])
}
