//! Shared fixtures for the estimator benchmarks.

use reorg_core::{ProtocolParams, SamplingConfig};

/// Default design and a stake where feasible states are common enough to
/// exercise every branch of the evaluators.
pub fn fixture(alpha: f64) -> (ProtocolParams, SamplingConfig) {
    let cfg = SamplingConfig::new(alpha, 7).expect("benchmark stake is valid");
    (ProtocolParams::default(), cfg)
}
