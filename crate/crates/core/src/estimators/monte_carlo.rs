use rayon::prelude::*;

use super::interval::{clopper_pearson, normal_interval};
use super::{check_length, EstimateResult, Method, Target, CONFIDENCE};
use crate::attack::{evaluate_slots, feasible_slots};
use crate::error::{Error, Result};
use crate::protocol::ProtocolParams;
use crate::rng::{chunk_plan, chunk_rng, DEFAULT_CHUNK_SIZE};
use crate::state::{AttackState, SamplingConfig, SlotSampler};

#[derive(Debug, Default, Clone, Copy)]
struct Tally {
    hits: u64,
    cost_sum: i128,
    cost_sq_sum: i128,
}

impl Tally {
    fn merge(self, other: Tally) -> Tally {
        Tally {
            hits: self.hits + other.hits,
            cost_sum: self.cost_sum + other.cost_sum,
            cost_sq_sum: self.cost_sq_sum + other.cost_sq_sum,
        }
    }
}

/// Standard Monte Carlo estimate from `samples` states drawn at the
/// configured stake, in chunks of the default size.
pub fn mc_estimate(
    params: &ProtocolParams,
    cfg: &SamplingConfig,
    n: usize,
    samples: u64,
    target: Target,
) -> Result<EstimateResult> {
    mc_estimate_chunked(params, cfg, n, samples, target, DEFAULT_CHUNK_SIZE)
}

pub fn mc_estimate_chunked(
    params: &ProtocolParams,
    cfg: &SamplingConfig,
    n: usize,
    samples: u64,
    target: Target,
    chunk_size: u64,
) -> Result<EstimateResult> {
    check_length(n)?;
    if samples == 0 {
        return Err(Error::NoSamples);
    }
    let sampler = SlotSampler::new(cfg.alpha);
    let chunks: Vec<(u64, u64)> = chunk_plan(samples, chunk_size).collect();
    let tallies: Vec<Tally> = chunks
        .into_par_iter()
        .map(|(chunk, len)| run_chunk(params, &sampler, n, target, cfg.seed, chunk, len))
        .collect();
    let tally = tallies.into_iter().fold(Tally::default(), Tally::merge);

    let (ci_low, ci_high) = clopper_pearson(tally.hits, samples, CONFIDENCE);
    let p_hat = tally.hits as f64 / samples as f64;
    let mut result = EstimateResult {
        method: Method::Mc,
        target,
        alpha: cfg.alpha,
        n,
        params: params.to_string(),
        samples,
        seed: cfg.seed,
        hits: tally.hits,
        p_hat,
        ci_low,
        ci_high,
        mean_cost: None,
        mean_cost_ci_low: None,
        mean_cost_ci_high: None,
        alpha_q: None,
        lr_floor_violations: None,
        truncated_mass: None,
    };
    if target == Target::MeanCost && tally.hits > 0 {
        let (mean, sd) = cost_moments(&tally);
        let (lo, hi) = normal_interval(mean, sd, tally.hits as f64);
        result.mean_cost = Some(mean);
        result.mean_cost_ci_low = Some(lo);
        result.mean_cost_ci_high = Some(hi);
    }
    Ok(result)
}

fn run_chunk(
    params: &ProtocolParams,
    sampler: &SlotSampler,
    n: usize,
    target: Target,
    seed: u64,
    chunk: u64,
    len: u64,
) -> Tally {
    let mut rng = chunk_rng(seed, chunk);
    let mut state = AttackState::buffer(n);
    let mut tally = Tally::default();
    for _ in 0..len {
        sampler.fill_state(&mut state, n, &mut rng);
        let slots = state.slots();
        match target {
            Target::Feasible => tally.hits += u64::from(feasible_slots(params, slots)),
            Target::Profitable => tally.hits += u64::from(evaluate_slots(params, slots).profitable_selfish),
            Target::MeanCost => {
                let ev = evaluate_slots(params, slots);
                if ev.feasible {
                    let c = i128::from(ev.cost.units());
                    tally.hits += 1;
                    tally.cost_sum += c;
                    tally.cost_sq_sum += c * c;
                }
            }
        }
    }
    tally
}

/// Mean and sample standard deviation of the feasible-state costs, in XTZ.
fn cost_moments(tally: &Tally) -> (f64, f64) {
    let k = tally.hits as f64;
    let scale = crate::protocol::Xtz::UNITS_PER_XTZ as f64;
    let mean_units = tally.cost_sum as f64 / k;
    let sd_units = if tally.hits > 1 {
        // Exact integer sums keep this free of cancellation trouble.
        let centered = tally.cost_sq_sum * i128::from(tally.hits as i64) - tally.cost_sum * tally.cost_sum;
        (centered as f64 / (k * (k - 1.0))).max(0.0).sqrt()
    } else {
        0.0
    };
    (mean_units / scale, sd_units / scale)
}
