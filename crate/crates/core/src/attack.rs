//! Forward-looking attack arithmetic: the private-fork race, its
//! feasibility, and the reward difference between attacking and behaving
//! honestly over the same slots.

use serde::{Deserialize, Serialize};

use crate::protocol::{ProtocolParams, Seconds, Xtz, ENDORSERS_PER_BLOCK};
use crate::state::{AttackState, SlotConfig};

/// Everything the estimators need to know about one state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackEvaluation {
    pub attacker_time: Seconds,
    pub honest_time: Seconds,
    /// The private fork is ready no later than the honest chain.
    pub feasible: bool,
    pub honest_reward: Xtz,
    pub attack_reward: Xtz,
    /// `honest_reward - attack_reward`; negative when attacking pays.
    pub cost: Xtz,
    /// Feasible and strictly more rewarding than honest play.
    pub profitable_selfish: bool,
}

/// Seconds the attacker needs to bake all `n` fork blocks.
///
/// The first fork block reuses every endorsement of the fork point; later
/// blocks carry only the attacker's own endorsements.
pub fn attacker_time(params: &ProtocolParams, state: &AttackState) -> Seconds {
    attacker_time_slots(params, state.slots())
}

/// Seconds the honest network needs for the same `n` blocks while the
/// attacker withholds its endorsements.
pub fn honest_time(params: &ProtocolParams, state: &AttackState) -> Seconds {
    honest_time_slots(params, state.slots())
}

/// Ties go to the attacker.
pub fn is_feasible(params: &ProtocolParams, state: &AttackState) -> bool {
    feasible_slots(params, state.slots())
}

/// The attacker's rewards over the `n` slots when it plays honestly.
pub fn honest_reward(params: &ProtocolParams, state: &AttackState) -> Xtz {
    honest_reward_slots(params, state.slots())
}

/// The attacker's rewards when all `n` fork blocks are accepted.
pub fn attack_reward(params: &ProtocolParams, state: &AttackState) -> Xtz {
    attack_reward_slots(params, state.slots())
}

pub fn evaluate(params: &ProtocolParams, state: &AttackState) -> AttackEvaluation {
    evaluate_slots(params, state.slots())
}

#[inline]
pub(crate) fn attacker_time_slots(params: &ProtocolParams, slots: &[SlotConfig]) -> Seconds {
    let mut iter = slots.iter();
    let Some(first) = iter.next() else { return 0 };
    let mut total = params.delay_unchecked(first.attacker(), ENDORSERS_PER_BLOCK);
    for slot in iter {
        total += params.delay_unchecked(slot.attacker(), slot.endorsements());
    }
    total
}

#[inline]
pub(crate) fn honest_time_slots(params: &ProtocolParams, slots: &[SlotConfig]) -> Seconds {
    slots
        .iter()
        .map(|s| params.delay_unchecked(s.honest(), ENDORSERS_PER_BLOCK - s.endorsements()))
        .sum()
}

#[inline]
pub(crate) fn feasible_slots(params: &ProtocolParams, slots: &[SlotConfig]) -> bool {
    attacker_time_slots(params, slots) <= honest_time_slots(params, slots)
}

pub(crate) fn honest_reward_slots(params: &ProtocolParams, slots: &[SlotConfig]) -> Xtz {
    let full_block = params.baker_reward_unchecked(0, ENDORSERS_PER_BLOCK);
    slots
        .iter()
        .map(|s| {
            let baking = if s.attacker() == 0 { full_block } else { Xtz::ZERO };
            baking + params.endorser_reward(0) * s.endorsements()
        })
        .sum()
}

pub(crate) fn attack_reward_slots(params: &ProtocolParams, slots: &[SlotConfig]) -> Xtz {
    slots
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let included = if i == 0 { ENDORSERS_PER_BLOCK } else { s.endorsements() };
            params.baker_reward_unchecked(s.attacker(), included) + params.endorser_reward(s.attacker()) * s.endorsements()
        })
        .sum()
}

pub(crate) fn evaluate_slots(params: &ProtocolParams, slots: &[SlotConfig]) -> AttackEvaluation {
    let attacker_time = attacker_time_slots(params, slots);
    let honest_time = honest_time_slots(params, slots);
    let feasible = attacker_time <= honest_time;
    let honest_reward = honest_reward_slots(params, slots);
    let attack_reward = attack_reward_slots(params, slots);
    AttackEvaluation {
        attacker_time,
        honest_time,
        feasible,
        honest_reward,
        attack_reward,
        cost: honest_reward - attack_reward,
        profitable_selfish: feasible && attack_reward > honest_reward,
    }
}
