//! Slot configurations, length-n attack states, their distribution under an
//! attacker stake fraction, and sampling.
//!
//! Priorities follow the "failures before the first success" geometric
//! convention with support `{0, 1, 2, ...}`. For one slot the honest best
//! priority is `Geometric(1 - α)`; when it is 0 the attacker's best priority
//! is `1 + Geometric(α)`, otherwise the attacker holds priority 0. The
//! attacker's endorsement count is an independent `Binomial(32, α)`.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::Geometric;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::{Priority, ENDORSERS_PER_BLOCK};

/// Default truncation bound for priority enumeration.
pub const DEFAULT_PRIORITY_CAP: u32 = 152;

/// One slot of an attack state: the attacker's and honest network's best
/// priorities at a height, paired with the attacker's endorsement count
/// for the preceding height.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SlotConfig {
    attacker: Priority,
    honest: Priority,
    endorsements: u32,
}

impl SlotConfig {
    pub fn new(attacker: Priority, honest: Priority, endorsements: u32) -> Result<Self> {
        if (attacker == 0) == (honest == 0) {
            return Err(Error::InvalidSlot { attacker, honest });
        }
        if endorsements > ENDORSERS_PER_BLOCK {
            return Err(Error::EndorsementsOutOfRange {
                count: endorsements,
                max: ENDORSERS_PER_BLOCK,
            });
        }
        Ok(SlotConfig {
            attacker,
            honest,
            endorsements,
        })
    }

    /// The attacker's best priority at this height.
    pub fn attacker(&self) -> Priority {
        self.attacker
    }

    /// The honest network's best priority at this height.
    pub fn honest(&self) -> Priority {
        self.honest
    }

    /// Endorsement rights the attacker owns at the preceding height.
    pub fn endorsements(&self) -> u32 {
        self.endorsements
    }
}

/// The next `n` slots after a fork point.
///
/// Slot `i` (1-based) pairs the priorities at height `ℓ + i` with the
/// attacker's endorsement count at height `ℓ + i − 1`, so the first slot
/// carries the fork point's own endorsements.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AttackState {
    slots: Vec<SlotConfig>,
}

impl AttackState {
    pub fn new(slots: Vec<SlotConfig>) -> Result<Self> {
        if slots.is_empty() {
            return Err(Error::EmptyState);
        }
        Ok(AttackState { slots })
    }

    /// Builds a state from parallel priority and endorsement sequences.
    pub fn from_sequences(attacker: &[Priority], honest: &[Priority], endorsements: &[u32]) -> Result<Self> {
        if attacker.len() != honest.len() || attacker.len() != endorsements.len() {
            return Err(Error::InvalidState(format!(
                "state sequences differ in length: {}, {}, {}",
                attacker.len(),
                honest.len(),
                endorsements.len()
            )));
        }
        let slots = attacker
            .iter()
            .zip(honest)
            .zip(endorsements)
            .map(|((&a, &h), &e)| SlotConfig::new(a, h, e))
            .collect::<Result<Vec<_>>>()?;
        AttackState::new(slots)
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn slots(&self) -> &[SlotConfig] {
        &self.slots
    }

    /// Empty scratch state for sampling loops; filled by
    /// [`SlotSampler::fill_state`] before use.
    pub(crate) fn buffer(n: usize) -> Self {
        AttackState {
            slots: Vec::with_capacity(n),
        }
    }
}

/// Attacker stake, seed, and enumeration cap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingConfig {
    pub alpha: f64,
    pub seed: u64,
    pub priority_cap: u32,
}

impl SamplingConfig {
    pub fn new(alpha: f64, seed: u64) -> Result<Self> {
        Self::with_cap(alpha, seed, DEFAULT_PRIORITY_CAP)
    }

    pub fn with_cap(alpha: f64, seed: u64, priority_cap: u32) -> Result<Self> {
        check_stake(alpha)?;
        if priority_cap == 0 {
            return Err(Error::OutOfRange {
                name: "priority_cap",
                value: 0.0,
                expected: "at least 1",
            });
        }
        Ok(SamplingConfig {
            alpha,
            seed,
            priority_cap,
        })
    }
}

/// Minority attacker stake: `0 < α < 0.5`.
pub fn check_stake(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 0.5 {
        Ok(())
    } else {
        Err(Error::StakeOutOfRange(alpha))
    }
}

/// Log-probability tables for one stake fraction.
#[derive(Debug, Clone)]
pub struct SlotModel {
    alpha: f64,
    ln_alpha: f64,
    ln_honest: f64,
    ln_endorsements: [f64; ENDORSERS_PER_BLOCK as usize + 1],
}

impl SlotModel {
    /// Tables for stake `alpha` in `(0, 1)`.
    pub fn new(alpha: f64) -> Self {
        debug_assert!(alpha > 0.0 && alpha < 1.0);
        let ln_alpha = alpha.ln();
        let ln_honest = (-alpha).ln_1p();
        let mut ln_endorsements = [0.0; ENDORSERS_PER_BLOCK as usize + 1];
        for (e, slot) in ln_endorsements.iter_mut().enumerate() {
            let k = e as f64;
            *slot = ln_choose(ENDORSERS_PER_BLOCK, e as u32) + k * ln_alpha + (f64::from(ENDORSERS_PER_BLOCK) - k) * ln_honest;
        }
        SlotModel {
            alpha,
            ln_alpha,
            ln_honest,
            ln_endorsements,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `ln Pr[A = a, H = h]`; `-inf` unless exactly one of them is zero.
    #[inline]
    pub fn ln_priority_pair(&self, attacker: Priority, honest: Priority) -> f64 {
        match (attacker == 0, honest == 0) {
            (true, false) => f64::from(honest) * self.ln_alpha + self.ln_honest,
            (false, true) => f64::from(attacker) * self.ln_honest + self.ln_alpha,
            _ => f64::NEG_INFINITY,
        }
    }

    /// `ln Pr[E = e]` for `E ~ Binomial(32, α)`.
    #[inline]
    pub fn ln_endorsements(&self, endorsements: u32) -> f64 {
        self.ln_endorsements
            .get(endorsements as usize)
            .copied()
            .unwrap_or(f64::NEG_INFINITY)
    }

    #[inline]
    pub fn ln_slot(&self, slot: &SlotConfig) -> f64 {
        self.ln_priority_pair(slot.attacker, slot.honest) + self.ln_endorsements(slot.endorsements)
    }

    pub fn ln_state(&self, state: &AttackState) -> f64 {
        state.slots.iter().map(|s| self.ln_slot(s)).sum()
    }
}

fn ln_choose(n: u32, k: u32) -> f64 {
    // Exact in u64 for n = 32.
    let k = k.min(n - k);
    let mut c: u64 = 1;
    for i in 0..u64::from(k) {
        c = c * (u64::from(n) - i) / (i + 1);
    }
    (c as f64).ln()
}

/// `Pr[A = a, H = h]` for raw priorities. Pairs that break the
/// one-of-them-is-zero rule are impossible and get probability 0.
pub fn priority_pair_probability(alpha: f64, attacker: Priority, honest: Priority) -> f64 {
    match (attacker == 0, honest == 0) {
        (true, false) => alpha.powi(honest as i32) * (1.0 - alpha),
        (false, true) => (1.0 - alpha).powi(attacker as i32) * alpha,
        _ => 0.0,
    }
}

/// Probability of one slot configuration.
pub fn slot_probability(cfg: &SamplingConfig, slot: &SlotConfig) -> f64 {
    SlotModel::new(cfg.alpha).ln_slot(slot).exp()
}

/// Probability of a whole state, accumulated in log space.
pub fn state_probability(cfg: &SamplingConfig, state: &AttackState) -> f64 {
    SlotModel::new(cfg.alpha).ln_state(state).exp()
}

/// Draws slot configurations for one stake fraction.
#[derive(Debug, Clone)]
pub struct SlotSampler {
    honest: Geometric,
    attacker: Geometric,
    endorsements: WeightedIndex<f64>,
}

impl SlotSampler {
    /// Sampler for stake `alpha` in `(0, 1)`.
    pub fn new(alpha: f64) -> Self {
        let model = SlotModel::new(alpha);
        let weights: Vec<f64> = model.ln_endorsements.iter().map(|l| l.exp()).collect();
        SlotSampler {
            honest: Geometric::new(1.0 - alpha).expect("1 - alpha lies in (0, 1)"),
            attacker: Geometric::new(alpha).expect("alpha lies in (0, 1)"),
            endorsements: WeightedIndex::new(weights).expect("binomial weights are positive"),
        }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SlotConfig {
        let honest = clamp_priority(self.honest.sample(rng));
        // The attacker cannot also hold priority 0, hence the shift by one.
        let attacker = if honest == 0 {
            clamp_priority(self.attacker.sample(rng).saturating_add(1))
        } else {
            0
        };
        let endorsements = self.endorsements.sample(rng) as u32;
        SlotConfig {
            attacker,
            honest,
            endorsements,
        }
    }

    /// Overwrites `state` with `n` fresh slots.
    pub fn fill_state<R: Rng + ?Sized>(&self, state: &mut AttackState, n: usize, rng: &mut R) {
        state.slots.clear();
        state.slots.extend((0..n).map(|_| self.sample(rng)));
    }
}

fn clamp_priority(p: u64) -> Priority {
    p.min(u64::from(Priority::MAX)) as Priority
}

/// One slot drawn at the configured stake.
pub fn sample_slot<R: Rng + ?Sized>(cfg: &SamplingConfig, rng: &mut R) -> SlotConfig {
    SlotSampler::new(cfg.alpha).sample(rng)
}

/// `n` independent slots assembled into a state.
pub fn sample_state<R: Rng + ?Sized>(cfg: &SamplingConfig, n: usize, rng: &mut R) -> Result<AttackState> {
    if n == 0 {
        return Err(Error::EmptyState);
    }
    let sampler = SlotSampler::new(cfg.alpha);
    let mut state = AttackState::buffer(n);
    sampler.fill_state(&mut state, n, rng);
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::chunk_rng;

    fn cfg(alpha: f64) -> SamplingConfig {
        SamplingConfig::new(alpha, 1).unwrap()
    }

    #[test]
    fn slot_requires_exactly_one_top_priority() {
        assert!(SlotConfig::new(0, 0, 3).is_err());
        assert!(SlotConfig::new(2, 1, 3).is_err());
        assert!(SlotConfig::new(0, 1, 33).is_err());
        assert!(SlotConfig::new(0, 1, 32).is_ok());
        assert!(SlotConfig::new(4, 0, 0).is_ok());
    }

    #[test]
    fn config_rejects_majority_or_empty_stake() {
        assert!(SamplingConfig::new(0.0, 0).is_err());
        assert!(SamplingConfig::new(0.5, 0).is_err());
        assert!(SamplingConfig::new(0.6, 0).is_err());
        assert!(SamplingConfig::with_cap(0.3, 0, 0).is_err());
    }

    #[test]
    fn priority_factor_at_even_stake() {
        assert_eq!(priority_pair_probability(0.5, 0, 1), 0.25);
        assert_eq!(priority_pair_probability(0.5, 0, 2), 0.125);
        assert_eq!(priority_pair_probability(0.5, 0, 0), 0.0);
        assert_eq!(priority_pair_probability(0.5, 3, 2), 0.0);
    }

    #[test]
    fn slot_probability_examples() {
        // 0.5^2 * 0.5 * C(32,16) / 2^32, evaluated independently with scipy.
        let s = SlotConfig::new(0, 2, 16).unwrap();
        let p = SlotModel::new(0.5).ln_slot(&s).exp();
        assert!((p - 0.017_493_741_761_427_35).abs() < 1e-10, "{p}");

        let s = SlotConfig::new(2, 0, 0).unwrap();
        let direct = 0.7f64.powi(2) * 0.3 * 0.7f64.powi(32);
        let p = slot_probability(&cfg(0.3), &s);
        assert!((p - direct).abs() / direct < 1e-12);
        assert!((p - 1.623_508_681_138_559_6e-6).abs() < 1e-17);
    }

    #[test]
    fn state_probability_is_product_of_slots() {
        let c = cfg(0.25);
        let s = SlotConfig::new(0, 1, 9).unwrap();
        let one = state_probability(&c, &AttackState::new(vec![s]).unwrap());
        assert_eq!(one, slot_probability(&c, &s));
        let two = state_probability(&c, &AttackState::new(vec![s, s]).unwrap());
        assert!((two - one * one).abs() / (one * one) < 1e-12);
        assert!(two > 0.0 && two <= 1.0);
    }

    #[test]
    fn truncated_domain_holds_almost_all_mass() {
        for alpha in [0.1, 0.2, 0.3, 0.45] {
            let model = SlotModel::new(alpha);
            let mut total = 0.0;
            let mut attacker_top = 0.0;
            for p in 1..=DEFAULT_PRIORITY_CAP {
                let honest_side = model.ln_priority_pair(0, p).exp();
                let attacker_side = model.ln_priority_pair(p, 0).exp();
                attacker_top += honest_side;
                for e in 0..=32 {
                    let pe = model.ln_endorsements(e).exp();
                    total += (honest_side + attacker_side) * pe;
                }
            }
            assert!(total > 1.0 - 1e-5, "alpha {alpha}: {total}");
            assert!((attacker_top - alpha).abs() < 1e-6);
        }
    }

    #[test]
    fn sampled_slots_are_valid_and_match_moments() {
        let alpha = 0.3;
        let sampler = SlotSampler::new(alpha);
        let mut rng = chunk_rng(11, 0);
        let n = 1_000_000;
        let (mut honest_top, mut endorse_sum) = (0u64, 0u64);
        for _ in 0..n {
            let s = sampler.sample(&mut rng);
            assert!((s.attacker == 0) ^ (s.honest == 0));
            honest_top += u64::from(s.honest == 0);
            endorse_sum += u64::from(s.endorsements);
        }
        let nf = n as f64;
        let p = honest_top as f64 / nf;
        let sd = (0.7 * 0.3 / nf).sqrt();
        assert!((p - 0.7).abs() < 3.0 * sd, "Pr[h=0] = {p}");
        let mean = endorse_sum as f64 / nf;
        let sd = (32.0 * 0.3 * 0.7 / nf).sqrt();
        assert!((mean - 9.6).abs() < 3.0 * sd, "mean e = {mean}");
    }

    #[test]
    fn tiny_stake_rarely_gets_top_priority() {
        let sampler = SlotSampler::new(1e-6);
        let mut rng = chunk_rng(3, 0);
        let top = (0..100_000).filter(|_| sampler.sample(&mut rng).attacker == 0).count();
        assert!(top <= 2);
    }

    #[test]
    fn sample_state_is_deterministic() {
        let c = cfg(0.35);
        let a = sample_state(&c, 5, &mut chunk_rng(c.seed, 0)).unwrap();
        let b = sample_state(&c, 5, &mut chunk_rng(c.seed, 0)).unwrap();
        assert_eq!(a, b);
        assert_eq!(sample_state(&c, 1, &mut chunk_rng(1, 0)).unwrap().len(), 1);
        assert!(sample_state(&c, 0, &mut chunk_rng(1, 0)).is_err());
    }
}
