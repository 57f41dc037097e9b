use rayon::prelude::*;

use super::interval::normal_interval;
use super::{check_length, EstimateResult, ISConfig, Method, Target};
use crate::attack::{evaluate_slots, feasible_slots};
use crate::error::{Error, Result};
use crate::protocol::ProtocolParams;
use crate::rng::{chunk_plan, chunk_rng, DEFAULT_CHUNK_SIZE};
use crate::state::{AttackState, SamplingConfig, SlotModel, SlotSampler};

#[derive(Debug, Default, Clone, Copy)]
struct Tally {
    hits: u64,
    violations: u64,
    w: f64,
    w2: f64,
    // Cost moments weighted by w and w², in XTZ.
    wc: f64,
    w2c: f64,
    w2c2: f64,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            hits: self.hits + o.hits,
            violations: self.violations + o.violations,
            w: self.w + o.w,
            w2: self.w2 + o.w2,
            wc: self.wc + o.wc,
            w2c: self.w2c + o.w2c,
            w2c2: self.w2c2 + o.w2c2,
        }
    }
}

/// Importance-sampling estimate: states are drawn at the proposal stake
/// and each hit is weighted by its likelihood ratio.
pub fn is_estimate(
    params: &ProtocolParams,
    cfg: &SamplingConfig,
    is: &ISConfig,
    n: usize,
    samples: u64,
    target: Target,
) -> Result<EstimateResult> {
    is_estimate_chunked(params, cfg, is, n, samples, target, DEFAULT_CHUNK_SIZE)
}

pub fn is_estimate_chunked(
    params: &ProtocolParams,
    cfg: &SamplingConfig,
    is: &ISConfig,
    n: usize,
    samples: u64,
    target: Target,
    chunk_size: u64,
) -> Result<EstimateResult> {
    check_length(n)?;
    is.check(cfg.alpha)?;
    if samples == 0 {
        return Err(Error::NoSamples);
    }
    let job = Job {
        params,
        sampler: SlotSampler::new(is.alpha_q()),
        target_model: SlotModel::new(cfg.alpha),
        proposal_model: SlotModel::new(is.alpha_q()),
        identity: is.alpha_q() == cfg.alpha,
        lr_floor: is.lr_floor(),
        n,
        target,
        seed: cfg.seed,
    };
    let chunks: Vec<(u64, u64)> = chunk_plan(samples, chunk_size).collect();
    let tallies: Vec<Tally> = chunks.into_par_iter().map(|(chunk, len)| job.run(chunk, len)).collect();
    let t = tallies.into_iter().fold(Tally::default(), Tally::merge);

    let count = samples as f64;
    let p_hat = t.w / count;
    let sd = (t.w2 / count - p_hat * p_hat).max(0.0).sqrt();
    let (lo, hi) = normal_interval(p_hat, sd, count);
    let mut result = EstimateResult {
        method: Method::Is,
        target,
        alpha: cfg.alpha,
        n,
        params: params.to_string(),
        samples,
        seed: cfg.seed,
        hits: t.hits,
        p_hat,
        ci_low: lo.clamp(0.0, 1.0),
        ci_high: hi.clamp(0.0, 1.0),
        mean_cost: None,
        mean_cost_ci_low: None,
        mean_cost_ci_high: None,
        alpha_q: Some(is.alpha_q()),
        lr_floor_violations: Some(t.violations),
        truncated_mass: None,
    };
    if target == Target::MeanCost && t.w > 0.0 {
        // Self-normalized ratio estimate with its delta-method spread.
        let mean = t.wc / t.w;
        let spread = (t.w2c2 - 2.0 * mean * t.w2c + mean * mean * t.w2).max(0.0);
        let half = super::Z_99 * spread.sqrt() / t.w;
        result.mean_cost = Some(mean);
        result.mean_cost_ci_low = Some(mean - half);
        result.mean_cost_ci_high = Some(mean + half);
    }
    Ok(result)
}

struct Job<'a> {
    params: &'a ProtocolParams,
    sampler: SlotSampler,
    target_model: SlotModel,
    proposal_model: SlotModel,
    identity: bool,
    lr_floor: f64,
    n: usize,
    target: Target,
    seed: u64,
}

impl Job<'_> {
    fn run(&self, chunk: u64, len: u64) -> Tally {
        let mut rng = chunk_rng(self.seed, chunk);
        let mut state = AttackState::buffer(self.n);
        let mut t = Tally::default();
        for _ in 0..len {
            self.sampler.fill_state(&mut state, self.n, &mut rng);
            let slots = state.slots();
            let (hit, cost) = match self.target {
                Target::Feasible => (feasible_slots(self.params, slots), 0.0),
                Target::Profitable => (evaluate_slots(self.params, slots).profitable_selfish, 0.0),
                Target::MeanCost => {
                    let ev = evaluate_slots(self.params, slots);
                    (ev.feasible, ev.cost.as_f64())
                }
            };
            if !hit {
                continue;
            }
            let w = if self.identity {
                1.0
            } else {
                let ln_lr: f64 = slots
                    .iter()
                    .map(|s| self.target_model.ln_slot(s) - self.proposal_model.ln_slot(s))
                    .sum();
                ln_lr.exp()
            };
            t.hits += 1;
            if w < self.lr_floor {
                t.violations += 1;
            }
            let w2 = w * w;
            t.w += w;
            t.w2 += w2;
            t.wc += w * cost;
            t.w2c += w2 * cost;
            t.w2c2 += w2 * cost * cost;
        }
        t
    }
}
