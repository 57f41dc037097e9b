//! Malicious-reorg and selfish-mining analysis for a Tezos-style
//! proof-of-stake chain.
//!
//! The crate models the slots following a fork point as random
//! [`AttackState`]s, decides whether a private fork of a given length can
//! outpace the honest chain, and estimates how often that happens by exact
//! enumeration, Monte Carlo, or importance sampling. On top of that sit a
//! sweep over protocol designs and a backward-looking chain health metric
//! with a chain simulator.

pub mod attack;
pub mod error;
pub mod estimators;
pub mod format;
pub mod health;
pub mod protocol;
pub mod rng;
pub mod special;
pub mod state;
pub mod sweep;

pub use attack::{evaluate, is_feasible, AttackEvaluation};
pub use error::{Error, Result};
pub use estimators::{
    choose_alpha_q, enumerate_probability, is_estimate, mc_estimate, EstimateResult, ISConfig, Method, Target,
};
pub use health::{ChainHistory, ChainRecord};
pub use protocol::{Priority, ProtocolParams, Seconds, Xtz, ENDORSERS_PER_BLOCK};
pub use state::{AttackState, SamplingConfig, SlotConfig};
pub use sweep::{SweepCell, SweepGrid};
