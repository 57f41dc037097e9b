use super::{check_length, EstimateResult, Method, Target};
use crate::attack::{attack_reward_slots, attacker_time_slots, honest_reward_slots, honest_time_slots};
use crate::error::{Error, Result};
use crate::protocol::{ProtocolParams, ENDORSERS_PER_BLOCK};
use crate::state::{SamplingConfig, SlotConfig, SlotModel};

/// Truncation and budget settings for exact enumeration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnumOptions {
    /// Slot configurations less likely than this are left out.
    pub prune: f64,
    /// Largest number of slot tuples to visit.
    pub budget: u64,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            prune: 1e-8,
            budget: 1_000_000_000,
        }
    }
}

/// Exact probability of `target` over the truncated state space, with
/// default pruning and budget.
pub fn enumerate_probability(
    params: &ProtocolParams,
    cfg: &SamplingConfig,
    n: usize,
    target: Target,
) -> Result<EstimateResult> {
    enumerate_with(params, cfg, n, target, EnumOptions::default())
}

/// One slot's contribution, precomputed for both positions it can take.
#[derive(Debug, Clone, Copy)]
struct Term {
    ln_p: f64,
    p: f64,
    /// Attacker minus honest seconds as the first fork slot.
    first_dt: i64,
    /// Attacker minus honest seconds as a later fork slot.
    rest_dt: i64,
    /// Honest minus attack reward in 1e-7 XTZ, first and later position.
    first_cost: i64,
    rest_cost: i64,
}

#[derive(Debug, Default, Clone, Copy)]
struct Sums {
    hits: u64,
    mass: f64,
    cost_mass: f64,
}

struct Walk<'a> {
    terms: &'a [Term],
    /// Later-position terms sorted by `rest_dt` with running probability
    /// totals, for counting feasible last slots by binary search.
    sorted_dt: Vec<i64>,
    prefix_p: Vec<f64>,
    n: usize,
    target: Target,
}

/// [`enumerate_probability`] with explicit pruning and budget.
pub fn enumerate_with(
    params: &ProtocolParams,
    cfg: &SamplingConfig,
    n: usize,
    target: Target,
    options: EnumOptions,
) -> Result<EstimateResult> {
    check_length(n)?;
    let terms = slot_domain(params, cfg, options.prune);
    let tuples = (terms.len() as u64).checked_pow(n as u32);
    let tuples = match tuples {
        Some(t) if t <= options.budget => t,
        _ => {
            return Err(Error::BudgetExceeded {
                needed: (terms.len() as f64).powi(n as i32),
                budget: options.budget as f64,
            })
        }
    };
    let kept: f64 = terms.iter().map(|t| t.p).sum();

    let mut order: Vec<&Term> = terms.iter().collect();
    order.sort_by_key(|t| t.rest_dt);
    let sorted_dt = order.iter().map(|t| t.rest_dt).collect();
    let prefix_p = std::iter::once(0.0)
        .chain(order.iter().scan(0.0, |acc, t| {
            *acc += t.p;
            Some(*acc)
        }))
        .collect();
    let walk = Walk {
        terms: &terms,
        sorted_dt,
        prefix_p,
        n,
        target,
    };
    let mut sums = Sums::default();
    walk.descend(0, 0, 0, 0.0, &mut sums);

    let p_hat = sums.mass.clamp(0.0, 1.0);
    let mut result = EstimateResult {
        method: Method::Enum,
        target,
        alpha: cfg.alpha,
        n,
        params: params.to_string(),
        samples: tuples,
        seed: cfg.seed,
        hits: sums.hits,
        p_hat,
        ci_low: p_hat,
        ci_high: p_hat,
        mean_cost: None,
        mean_cost_ci_low: None,
        mean_cost_ci_high: None,
        alpha_q: None,
        lr_floor_violations: None,
        truncated_mass: Some((1.0 - kept.powi(n as i32)).max(0.0)),
    };
    if target == Target::MeanCost && sums.mass > 0.0 {
        let mean = sums.cost_mass / sums.mass;
        result.mean_cost = Some(mean);
        result.mean_cost_ci_low = Some(mean);
        result.mean_cost_ci_high = Some(mean);
    }
    Ok(result)
}

impl Walk<'_> {
    fn descend(&self, depth: usize, dt: i64, cost: i64, ln_p: f64, sums: &mut Sums) {
        let last = depth + 1 == self.n;
        if last && depth > 0 && self.target == Target::Feasible {
            // Feasible iff rest_dt <= -dt: a prefix of the sorted terms.
            let count = self.sorted_dt.partition_point(|&x| x <= -dt);
            sums.hits += count as u64;
            sums.mass += ln_p.exp() * self.prefix_p[count];
            return;
        }
        for term in self.terms {
            let (step_dt, step_cost) = if depth == 0 {
                (term.first_dt, term.first_cost)
            } else {
                (term.rest_dt, term.rest_cost)
            };
            let dt = dt + step_dt;
            let cost = cost + step_cost;
            let ln_p = ln_p + term.ln_p;
            if !last {
                self.descend(depth + 1, dt, cost, ln_p, sums);
                continue;
            }
            let feasible = dt <= 0;
            let hit = match self.target {
                Target::Feasible | Target::MeanCost => feasible,
                Target::Profitable => feasible && cost < 0,
            };
            if hit {
                let p = ln_p.exp();
                sums.hits += 1;
                sums.mass += p;
                sums.cost_mass += p * cost as f64 / crate::protocol::Xtz::UNITS_PER_XTZ as f64;
            }
        }
    }
}

/// Every slot configuration within the priority cap whose probability is
/// at least `prune`.
fn slot_domain(params: &ProtocolParams, cfg: &SamplingConfig, prune: f64) -> Vec<Term> {
    let model = SlotModel::new(cfg.alpha);
    let ln_prune = prune.ln();
    let mut terms = Vec::new();
    let pairs = (1..=cfg.priority_cap)
        .map(|h| (0, h))
        .chain((1..=cfg.priority_cap).map(|a| (a, 0)));
    for (a, h) in pairs {
        let ln_pair = model.ln_priority_pair(a, h);
        if ln_pair < ln_prune {
            continue;
        }
        for e in 0..=ENDORSERS_PER_BLOCK {
            let ln_p = ln_pair + model.ln_endorsements(e);
            if ln_p < ln_prune {
                continue;
            }
            let slot = SlotConfig::new(a, h, e).expect("domain slots are valid");
            terms.push(term(params, slot, ln_p));
        }
    }
    terms
}

fn term(params: &ProtocolParams, slot: SlotConfig, ln_p: f64) -> Term {
    let one = [slot];
    let honest_time = honest_time_slots(params, &one);
    let honest_reward = honest_reward_slots(params, &one).units();
    // A later slot's own terms, isolated by differencing a two-slot state
    // against its first slot.
    let pair = [slot, slot];
    let rest_attack_time = attacker_time_slots(params, &pair) - attacker_time_slots(params, &one);
    let rest_attack_reward = attack_reward_slots(params, &pair).units() - attack_reward_slots(params, &one).units();
    Term {
        ln_p,
        p: ln_p.exp(),
        first_dt: attacker_time_slots(params, &one) - honest_time,
        rest_dt: rest_attack_time - honest_time,
        first_cost: honest_reward - attack_reward_slots(params, &one).units(),
        rest_cost: honest_reward - rest_attack_reward,
    }
}
