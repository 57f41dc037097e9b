use std::path::PathBuf;

use clap::Args;
use reorg_core::sweep::{run_sweep, smooth_grid, Design, SweepCell, SweepGrid};
use serde::Serialize;

use crate::args::{self, DesignList, GridSpec};
use crate::error::CliResult;
use crate::manifest::Run;
use crate::output::{self, num};

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long, value_parser = args::stake)]
    pub alpha: f64,
    /// Weight of the selfish-mining term, in [0, 1].
    #[arg(long, value_parser = args::weight)]
    pub beta: f64,
    /// Deep-reorg length.
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
    pub n1: u32,
    /// Selfish-mining length.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    pub n2: u32,
    /// Axes as ei=LO:HI:STEP,de=LO:HI:STEP,dp=LO:HI:STEP; omitted axes span
    /// ei 0:32, de 4:20, dp 0:60 in steps of 1.
    #[arg(long, value_parser = args::grid, default_value = "")]
    #[serde(skip)]
    pub grid: GridSpec,
    /// Extra designs to evaluate, as "EI,DE,DP;EI,DE,DP".
    #[arg(long, value_parser = args::designs)]
    pub include: Option<DesignList>,
    /// Samples per cell and objective term.
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Monte Carlo hits below which a term is re-estimated by importance
    /// sampling.
    #[arg(long, default_value_t = 100)]
    pub is_threshold: u64,
    /// Add a column of Gaussian-smoothed objective values (sigma in grid
    /// cells) over the lattice.
    #[arg(long)]
    pub smooth: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Resolved<'a> {
    #[serde(flatten)]
    args: &'a SweepArgs,
    grid: String,
    failed_cells: Vec<Design>,
}

pub fn run(a: SweepArgs) -> CliResult {
    let run = Run::start("sweep");
    if let Some(sigma) = a.smooth {
        if !(sigma >= 0.0) {
            return Err(crate::error::CliError::Usage(format!("--smooth must be non-negative, got {sigma}")));
        }
    }
    let grid = SweepGrid {
        ei_range: a.grid.ei,
        de_range: a.grid.de,
        dp_range: a.grid.dp,
        extra: a.include.clone().map(|d| d.0).unwrap_or_default(),
        alpha: a.alpha,
        beta: a.beta,
        n1: a.n1 as usize,
        n2: a.n2 as usize,
        samples_per_cell: a.samples,
        seed: a.seed,
        is_threshold: a.is_threshold,
    };
    grid.validate()?;
    let cells = run_sweep(&grid)?;
    let smoothed = match a.smooth {
        Some(sigma) => Some(smooth_lattice(&grid, &cells, sigma)?),
        None => None,
    };

    let mut w = csv::Writer::from_writer(output::open(a.out.as_deref())?);
    let mut header = vec!["ei", "de", "dp", "o1", "o1_lo", "o1_hi", "o2", "o2_lo", "o2_hi", "objective"];
    if smoothed.is_some() {
        header.push("smoothed");
    }
    w.write_record(&header)?;
    for (i, c) in cells.iter().enumerate() {
        let mut row = vec![
            c.design.0.to_string(),
            c.design.1.to_string(),
            c.design.2.to_string(),
            num(c.o1.p_hat),
            num(c.o1.ci_low),
            num(c.o1.ci_high),
            num(c.o2.p_hat),
            num(c.o2.ci_low),
            num(c.o2.ci_high),
            num(c.objective),
        ];
        if let Some(s) = &smoothed {
            row.push(s[i].map(num).unwrap_or_default());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    drop(w);

    let failed: Vec<Design> = cells.iter().filter(|c| c.failed()).map(|c| c.design).collect();
    for c in cells.iter().filter(|c| c.failed()) {
        eprintln!(
            "warning: cell {},{},{} failed: {}",
            c.design.0,
            c.design.1,
            c.design.2,
            c.error.as_deref().unwrap_or("no estimate")
        );
    }
    let resolved = Resolved {
        args: &a,
        grid: format!("ei={},de={},dp={}", grid.ei_range, grid.de_range, grid.dp_range),
        failed_cells: failed,
    };
    run.finish(&resolved, Some(a.seed), a.out.as_deref(), &[])
}

/// Smoothed objective for lattice cells; extra designs off the lattice get
/// none.
fn smooth_lattice(grid: &SweepGrid, cells: &[SweepCell], sigma: f64) -> CliResult<Vec<Option<f64>>> {
    let lattice: Vec<SweepCell> = cells.iter().filter(|c| grid.on_lattice(c.design)).cloned().collect();
    let values = smooth_grid(&lattice, sigma)?;
    let mut values = values.into_iter();
    Ok(cells
        .iter()
        .map(|c| if grid.on_lattice(c.design) { values.next() } else { None })
        .collect())
}
