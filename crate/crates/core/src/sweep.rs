//! Grid sweeps of the design objective
//! `O(ξ, β) = (1 − β)·Pr[F_{n1}] + β·Pr[P_{n2}]`, comparisons of candidate
//! designs against the grid optimum, and Gaussian smoothing of the grid for
//! plotting.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{is_estimate, mc_estimate, EstimateResult, ISConfig, Method, Target};
use crate::protocol::{ProtocolParams, ENDORSERS_PER_BLOCK};
use crate::rng::derive_seed;
use crate::state::SamplingConfig;

/// A design tuple `(initial_endorsers, delay_endorse, delay_priority)`.
pub type Design = (u32, u64, u64);

/// Inclusive integer range `lo..=hi` walked in steps of `step`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridRange {
    pub lo: u64,
    pub hi: u64,
    pub step: u64,
}

impl GridRange {
    pub fn new(lo: u64, hi: u64, step: u64) -> Result<Self> {
        let r = GridRange { lo, hi, step };
        r.validate("range")?;
        Ok(r)
    }

    pub fn single(value: u64) -> Self {
        GridRange {
            lo: value,
            hi: value,
            step: 1,
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        if self.step == 0 {
            return Err(Error::InvalidGrid(format!("{name} step must be positive")));
        }
        if self.lo > self.hi {
            return Err(Error::InvalidGrid(format!("{name} range {}:{} is empty", self.lo, self.hi)));
        }
        Ok(())
    }

    pub fn values(&self) -> impl Iterator<Item = u64> + Clone {
        (self.lo..=self.hi).step_by(self.step.max(1) as usize)
    }

    pub fn contains(&self, v: u64) -> bool {
        v >= self.lo && v <= self.hi && (v - self.lo) % self.step == 0
    }
}

impl fmt::Display for GridRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.step)
    }
}

impl FromStr for GridRange {
    type Err = Error;

    /// `LO:HI:STEP`, `LO:HI` (step 1), or a single value.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let num = |t: &str| {
            t.parse::<u64>()
                .map_err(|_| Error::InvalidGrid(format!("`{t}` is not a non-negative integer")))
        };
        match parts.as_slice() {
            [v] => Ok(GridRange::single(num(v)?)),
            [lo, hi] => GridRange::new(num(lo)?, num(hi)?, 1),
            [lo, hi, step] => GridRange::new(num(lo)?, num(hi)?, num(step)?),
            _ => Err(Error::InvalidGrid(format!("range `{s}` is not LO:HI:STEP"))),
        }
    }
}

/// Parses `EI,DE,DP`.
pub fn parse_design(s: &str) -> Result<Design> {
    let p: ProtocolParams = s.parse().map_err(Error::InvalidGrid)?;
    Ok(p.design())
}

/// Sweep configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub ei_range: GridRange,
    pub de_range: GridRange,
    pub dp_range: GridRange,
    /// Designs evaluated in addition to the lattice.
    pub extra: Vec<Design>,
    pub alpha: f64,
    pub beta: f64,
    pub n1: usize,
    pub n2: usize,
    pub samples_per_cell: u64,
    pub seed: u64,
    /// Monte Carlo hit count below which a cell is re-estimated by
    /// importance sampling.
    pub is_threshold: u64,
}

impl SweepGrid {
    /// Full default ranges at stake `alpha` and weight `beta`.
    pub fn new(alpha: f64, beta: f64) -> Self {
        SweepGrid {
            ei_range: GridRange { lo: 0, hi: 32, step: 1 },
            de_range: GridRange { lo: 4, hi: 20, step: 1 },
            dp_range: GridRange { lo: 0, hi: 60, step: 1 },
            extra: Vec::new(),
            alpha,
            beta,
            n1: 20,
            n2: 3,
            samples_per_cell: 100_000,
            seed: 0,
            is_threshold: 100,
        }
    }

    /// A one-cell grid at `design`.
    pub fn single(design: Design, alpha: f64, beta: f64) -> Self {
        SweepGrid {
            ei_range: GridRange::single(u64::from(design.0)),
            de_range: GridRange::single(design.1),
            dp_range: GridRange::single(design.2),
            ..SweepGrid::new(alpha, beta)
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.ei_range.validate("ei")?;
        self.de_range.validate("de")?;
        self.dp_range.validate("dp")?;
        if self.ei_range.hi > u64::from(ENDORSERS_PER_BLOCK) {
            return Err(Error::InitialEndorsersOutOfRange {
                initial: self.ei_range.hi.min(u64::from(u32::MAX)) as u32,
                max: ENDORSERS_PER_BLOCK,
            });
        }
        for &(ei, _, _) in &self.extra {
            if ei > ENDORSERS_PER_BLOCK {
                return Err(Error::InitialEndorsersOutOfRange {
                    initial: ei,
                    max: ENDORSERS_PER_BLOCK,
                });
            }
        }
        crate::state::check_stake(self.alpha)?;
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::OutOfRange {
                name: "beta",
                value: self.beta,
                expected: "within [0, 1]",
            });
        }
        if self.n1 == 0 || self.n2 == 0 {
            return Err(Error::EmptyState);
        }
        if self.samples_per_cell == 0 {
            return Err(Error::NoSamples);
        }
        Ok(())
    }

    /// Whether `design` lies on the range lattice.
    pub fn on_lattice(&self, design: Design) -> bool {
        self.ei_range.contains(u64::from(design.0)) && self.de_range.contains(design.1) && self.dp_range.contains(design.2)
    }

    /// Every design to evaluate, in ascending `(ei, de, dp)` order.
    pub fn designs(&self) -> Vec<Design> {
        let mut set: BTreeSet<Design> = BTreeSet::new();
        for ei in self.ei_range.values() {
            for de in self.de_range.values() {
                for dp in self.dp_range.values() {
                    set.insert((ei as u32, de, dp));
                }
            }
        }
        set.extend(self.extra.iter().copied());
        set.into_iter().collect()
    }
}

/// One of the two objective terms for a cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellEstimate {
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// `None` when read back from a file that does not record it.
    pub method: Option<Method>,
    pub hits: u64,
}

impl CellEstimate {
    pub fn from_values(p_hat: f64, ci_low: f64, ci_high: f64) -> Self {
        CellEstimate {
            p_hat,
            ci_low,
            ci_high,
            method: None,
            hits: 0,
        }
    }

    fn failed() -> Self {
        Self::from_values(f64::NAN, f64::NAN, f64::NAN)
    }

    fn from_result(r: &EstimateResult) -> Self {
        CellEstimate {
            p_hat: r.p_hat,
            ci_low: r.ci_low,
            ci_high: r.ci_high,
            method: Some(r.method),
            hits: r.hits,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub design: Design,
    /// Deep-reorg probability `Pr[F_{n1}]`.
    pub o1: CellEstimate,
    /// Selfish-mine probability `Pr[P_{n2}]`.
    pub o2: CellEstimate,
    pub beta: f64,
    pub objective: f64,
    /// Estimator error, if the cell could not be evaluated.
    pub error: Option<String>,
}

impl SweepCell {
    pub fn new(design: Design, o1: CellEstimate, o2: CellEstimate, beta: f64) -> Self {
        SweepCell {
            design,
            o1,
            o2,
            beta,
            objective: objective(o1.p_hat, o2.p_hat, beta),
            error: None,
        }
    }

    /// The objective at another weight.
    pub fn objective_at(&self, beta: f64) -> f64 {
        objective(self.o1.p_hat, self.o2.p_hat, beta)
    }

    pub fn failed(&self) -> bool {
        self.error.is_some() || self.objective.is_nan()
    }
}

pub fn objective(o1: f64, o2: f64, beta: f64) -> f64 {
    (1.0 - beta) * o1 + beta * o2
}

/// Evaluates every design of the grid. Cells run in parallel but come back
/// in ascending `(ei, de, dp)` order; an estimator failure marks its cell
/// instead of aborting the sweep.
pub fn run_sweep(grid: &SweepGrid) -> Result<Vec<SweepCell>> {
    grid.validate()?;
    let cells = grid
        .designs()
        .into_par_iter()
        .map(|design| evaluate_cell(grid, design))
        .collect();
    Ok(cells)
}

fn evaluate_cell(grid: &SweepGrid, design: Design) -> SweepCell {
    let labels = [u64::from(design.0), design.1, design.2];
    let attempt = || -> Result<(CellEstimate, CellEstimate)> {
        let params = ProtocolParams::new(design.0, design.1, design.2)?;
        let o1 = estimate_term(grid, &params, grid.n1, Target::Feasible, derive_seed(grid.seed, &[labels[0], labels[1], labels[2], 1]))?;
        let o2 = estimate_term(grid, &params, grid.n2, Target::Profitable, derive_seed(grid.seed, &[labels[0], labels[1], labels[2], 2]))?;
        Ok((o1, o2))
    };
    match attempt() {
        Ok((o1, o2)) => SweepCell::new(design, o1, o2, grid.beta),
        Err(err) => SweepCell {
            error: Some(err.to_string()),
            ..SweepCell::new(design, CellEstimate::failed(), CellEstimate::failed(), grid.beta)
        },
    }
}

/// Monte Carlo first; importance sampling when Monte Carlo saw fewer hits
/// than the threshold, unless importance sampling sees none either.
fn estimate_term(grid: &SweepGrid, params: &ProtocolParams, n: usize, target: Target, seed: u64) -> Result<CellEstimate> {
    let cfg = SamplingConfig::new(grid.alpha, seed)?;
    let mc = mc_estimate(params, &cfg, n, grid.samples_per_cell, target)?;
    if mc.hits >= grid.is_threshold {
        return Ok(CellEstimate::from_result(&mc));
    }
    let Ok(proposal) = ISConfig::heuristic(grid.alpha, n) else {
        return Ok(CellEstimate::from_result(&mc));
    };
    let is = is_estimate(params, &cfg, &proposal, n, grid.samples_per_cell, target)?;
    if is.hits == 0 {
        return Ok(CellEstimate::from_result(&mc));
    }
    Ok(CellEstimate::from_result(&is))
}

/// How one candidate design compares to the best design of the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub beta: f64,
    pub candidate: Design,
    pub candidate_objective: f64,
    pub min_objective: f64,
    pub argmin: Design,
    /// `min_objective / candidate_objective`, in `(0, 1]`; 1 is optimal.
    pub ratio: f64,
}

/// For each weight, the grid minimum of the objective and each candidate's
/// ratio to it. Failed cells are skipped.
pub fn compare_designs(cells: &[SweepCell], candidates: &[Design], betas: &[f64]) -> Result<Vec<Comparison>> {
    let usable: Vec<&SweepCell> = cells.iter().filter(|c| !c.o1.p_hat.is_nan() && !c.o2.p_hat.is_nan()).collect();
    let mut lookup = Vec::with_capacity(candidates.len());
    for &cand in candidates {
        let cell = usable
            .iter()
            .find(|c| c.design == cand)
            .ok_or(Error::MissingCandidate(cand.0, cand.1, cand.2))?;
        lookup.push(*cell);
    }
    let mut out = Vec::new();
    for &beta in betas {
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::OutOfRange {
                name: "beta",
                value: beta,
                expected: "within [0, 1]",
            });
        }
        let best = usable
            .iter()
            .min_by(|a, b| a.objective_at(beta).total_cmp(&b.objective_at(beta)))
            .expect("candidates exist, so the grid is not empty");
        let min_objective = best.objective_at(beta);
        for cell in &lookup {
            let candidate_objective = cell.objective_at(beta);
            let ratio = if candidate_objective > 0.0 {
                min_objective / candidate_objective
            } else {
                1.0
            };
            out.push(Comparison {
                beta,
                candidate: cell.design,
                candidate_objective,
                min_objective,
                argmin: best.design,
                ratio,
            });
        }
    }
    Ok(out)
}

/// Objective values after a separable Gaussian filter over the three grid
/// axes, in the order of `cells`. Edges are padded by mirror reflection
/// (`d c b a | a b c d | d c b a`) and the kernel is cut at four standard
/// deviations. `sigma` is in grid cells; 0 returns the values unchanged.
///
/// The cells must form a full rectangular grid.
pub fn smooth_grid(cells: &[SweepCell], sigma: f64) -> Result<Vec<f64>> {
    if !(sigma >= 0.0) {
        return Err(Error::OutOfRange {
            name: "sigma",
            value: sigma,
            expected: "non-negative",
        });
    }
    let axes = [
        distinct(cells.iter().map(|c| u64::from(c.design.0))),
        distinct(cells.iter().map(|c| c.design.1)),
        distinct(cells.iter().map(|c| c.design.2)),
    ];
    let shape = [axes[0].len(), axes[1].len(), axes[2].len()];
    let total = shape.iter().product::<usize>();
    if cells.is_empty() || total != cells.len() {
        return Err(Error::InvalidGrid(format!(
            "smoothing needs a full rectangular grid: {} cells for a {}x{}x{} lattice",
            cells.len(),
            shape[0],
            shape[1],
            shape[2]
        )));
    }
    let index_of = |c: &SweepCell| {
        let i = axes[0].binary_search(&u64::from(c.design.0)).unwrap();
        let j = axes[1].binary_search(&c.design.1).unwrap();
        let k = axes[2].binary_search(&c.design.2).unwrap();
        (i * shape[1] + j) * shape[2] + k
    };
    let mut values = vec![f64::NAN; total];
    let mut seen = vec![false; total];
    for c in cells {
        let idx = index_of(c);
        if seen[idx] {
            return Err(Error::InvalidGrid(format!("duplicate cell {:?}", c.design)));
        }
        seen[idx] = true;
        values[idx] = c.objective;
    }
    if sigma > 0.0 {
        let kernel = gaussian_kernel(sigma);
        let strides = [shape[1] * shape[2], shape[2], 1];
        for axis in 0..3 {
            values = filter_axis(&values, shape, strides, axis, &kernel);
        }
    }
    Ok(cells.iter().map(|c| values[index_of(c)]).collect())
}

fn distinct(values: impl Iterator<Item = u64>) -> Vec<u64> {
    values.collect::<BTreeSet<_>>().into_iter().collect()
}

/// Normalized weights for offsets `-r..=r`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (4.0 * sigma + 0.5) as i64;
    let raw: Vec<f64> = (-radius..=radius)
        .map(|x| (-0.5 * (x as f64 / sigma).powi(2)).exp())
        .collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / sum).collect()
}

fn reflect(i: i64, len: usize) -> usize {
    let n = len as i64;
    let period = 2 * n;
    let m = i.rem_euclid(period);
    (if m < n { m } else { period - 1 - m }) as usize
}

fn filter_axis(values: &[f64], shape: [usize; 3], strides: [usize; 3], axis: usize, kernel: &[f64]) -> Vec<f64> {
    let radius = (kernel.len() / 2) as i64;
    let len = shape[axis];
    let mut out = vec![0.0; values.len()];
    for (flat, slot) in out.iter_mut().enumerate() {
        let pos = (flat / strides[axis]) % len;
        let base = flat - pos * strides[axis];
        *slot = kernel
            .iter()
            .enumerate()
            .map(|(t, w)| {
                let src = reflect(pos as i64 + t as i64 - radius, len);
                w * values[base + src * strides[axis]]
            })
            .sum();
    }
    out
}
