//! Chain simulation with an attacker who knows every future slot.
//!
//! Heights are drawn up front, one [`SlotConfig`] per height: the honest
//! and attacker best priorities there, and the attacker's endorsement
//! rights at that height. At each tip `ℓ` the attacker looks for the
//! longest feasible fork with `min_attack ≤ n ≤ max_attack` that fits in
//! the remaining blocks. Without one, the next block is ideal: the attacker
//! behaves honestly, so somebody bakes at priority 0 and every endorsement
//! is included.
//!
//! With one, the honest network publishes heights `ℓ+1..=ℓ+n` while the
//! attacker withholds its endorsements, and health is measured on that
//! public view after each block. Then the `n` fork blocks replace them:
//! the first carries all 32 endorsements, later ones only the attacker's.

use serde::{Deserialize, Serialize};

use super::{health_of, AttackEvent, ChainHistory, ChainRecord};
use crate::attack::feasible_slots;
use crate::error::{Error, Result};
use crate::protocol::{ProtocolParams, ENDORSERS_PER_BLOCK};
use crate::rng::sequential_rng;
use crate::state::{SlotConfig, SlotSampler};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    /// Attacker stake in `[0, 0.5)`; 0 means no attacker.
    pub alpha: f64,
    pub seed: u64,
    /// Final chain length, genesis included.
    pub blocks: usize,
    pub min_attack: usize,
    pub max_attack: usize,
    pub window: usize,
}

impl SimulationConfig {
    /// Attacks of every length from `min_attack` up to one below the
    /// default window.
    pub fn new(alpha: f64, seed: u64, blocks: usize, min_attack: usize) -> Self {
        SimulationConfig {
            alpha,
            seed,
            blocks,
            min_attack,
            max_attack: super::DEFAULT_WINDOW - 1,
            window: super::DEFAULT_WINDOW,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..0.5).contains(&self.alpha) {
            return Err(Error::OutOfRange {
                name: "alpha",
                value: self.alpha,
                expected: "within [0, 0.5)",
            });
        }
        if self.window < 2 {
            return Err(Error::WindowTooSmall(self.window));
        }
        if self.blocks < 2 {
            return Err(Error::InvalidSimulation("need at least 2 blocks".into()));
        }
        if self.min_attack < 2 {
            return Err(Error::InvalidSimulation(format!("min_attack {} is below 2", self.min_attack)));
        }
        if self.max_attack < self.min_attack {
            return Err(Error::InvalidSimulation(format!(
                "max_attack {} is below min_attack {}",
                self.max_attack, self.min_attack
            )));
        }
        // A reorg must stay visible to the metric: its fork point has to
        // fall inside the window of the block that executes it.
        if self.max_attack >= self.window {
            return Err(Error::InvalidSimulation(format!(
                "max_attack {} must be below the window {}",
                self.max_attack, self.window
            )));
        }
        Ok(())
    }
}

/// Health of the public chain right after `slot` was published.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub slot: u64,
    pub health: f64,
    /// The block was published while a private fork was being built.
    pub under_attack: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutput {
    /// The final chain, reorgs applied.
    pub history: ChainHistory,
    pub events: Vec<AttackEvent>,
    /// One point per published block after genesis.
    pub trace: Vec<TracePoint>,
}

pub fn simulate_chain(params: &ProtocolParams, cfg: &SimulationConfig) -> Result<SimulationOutput> {
    cfg.validate()?;
    let draws = draw_slots(cfg);
    let mut chain = vec![ChainRecord::ideal(0)];
    let mut events = Vec::new();
    let mut trace = Vec::with_capacity(cfg.blocks);
    let mut state: Vec<SlotConfig> = Vec::with_capacity(cfg.max_attack);

    while chain.len() < cfg.blocks {
        let tip = chain.len() - 1;
        let fork = match &draws {
            Some(d) => longest_feasible(params, cfg, d, tip, &mut state),
            None => None,
        };
        let Some(n) = fork else {
            chain.push(ChainRecord::ideal(chain.len() as u64));
            trace.push(point(params, cfg, &chain, false));
            continue;
        };
        let d = draws.as_ref().expect("forks need draws");
        for i in 1..=n {
            let slot = (tip + i) as u64;
            chain.push(ChainRecord {
                slot,
                priority: d[tip + i].honest(),
                endorsements: ENDORSERS_PER_BLOCK - d[tip + i - 1].endorsements(),
            });
            trace.push(point(params, cfg, &chain, true));
        }
        chain.truncate(tip + 1);
        for i in 1..=n {
            chain.push(ChainRecord {
                slot: (tip + i) as u64,
                priority: d[tip + i].attacker(),
                endorsements: if i == 1 {
                    ENDORSERS_PER_BLOCK
                } else {
                    d[tip + i - 1].endorsements()
                },
            });
        }
        events.push(AttackEvent {
            executed_at: (tip + n) as u64,
            fork_length: n,
        });
    }
    Ok(SimulationOutput {
        history: ChainHistory::new(chain, cfg.window)?,
        events,
        trace,
    })
}

fn point(params: &ProtocolParams, cfg: &SimulationConfig, chain: &[ChainRecord], under_attack: bool) -> TracePoint {
    TracePoint {
        slot: chain[chain.len() - 1].slot,
        health: health_of(params, chain, cfg.window),
        under_attack,
    }
}

/// One slot per height, in height order from a single stream; `None`
/// without an attacker.
fn draw_slots(cfg: &SimulationConfig) -> Option<Vec<SlotConfig>> {
    if cfg.alpha == 0.0 {
        return None;
    }
    let sampler = SlotSampler::new(cfg.alpha);
    let mut rng = sequential_rng(cfg.seed);
    Some((0..cfg.blocks + 1).map(|_| sampler.sample(&mut rng)).collect())
}

/// Longest feasible fork from `tip` that ends inside the chain.
fn longest_feasible(
    params: &ProtocolParams,
    cfg: &SimulationConfig,
    draws: &[SlotConfig],
    tip: usize,
    state: &mut Vec<SlotConfig>,
) -> Option<usize> {
    let room = cfg.blocks - 1 - tip;
    let longest = cfg.max_attack.min(room);
    if longest < cfg.min_attack {
        return None;
    }
    // Fork slot i pairs the priorities at height tip+i with the attacker's
    // endorsements at height tip+i-1.
    state.clear();
    state.extend((1..=longest).map(|i| {
        SlotConfig::new(draws[tip + i].attacker(), draws[tip + i].honest(), draws[tip + i - 1].endorsements())
            .expect("recombined slots stay valid")
    }));
    (cfg.min_attack..=longest)
        .rev()
        .find(|&n| feasible_slots(params, &state[..n]))
}
