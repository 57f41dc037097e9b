//! The convolution oracle against reference values and against the
//! crate's exact enumeration.

mod common;

use common::{feasible_probability, ALPHAS, DEFAULT_XI, F2_REFERENCE};
use reorg_core::estimators::{enumerate_with, EnumOptions};
use reorg_core::{enumerate_probability, ProtocolParams, SamplingConfig, Target};

#[test]
fn oracle_reproduces_reference_two_slot_values() {
    for (alpha, reference) in ALPHAS.iter().zip(F2_REFERENCE) {
        let p = feasible_probability(*alpha, 2, DEFAULT_XI);
        assert!((p - reference).abs() < 1e-12, "alpha={alpha}: {p} vs {reference}");
    }
}

#[test]
fn oracle_deep_reorg_values() {
    // Independent Python convolution values.
    let cases = [
        (0.45, DEFAULT_XI, 0.059_157_007_065_294_684),
        (0.40, DEFAULT_XI, 0.000_496_424_084_168_907_4),
        (0.36, DEFAULT_XI, 1.197_526_493_870_831_9e-6),
        (0.45, (15, 5, 8), 0.040_561_570_657_209_87),
    ];
    for (alpha, xi, reference) in cases {
        let p = feasible_probability(alpha, 20, xi);
        assert!((p - reference).abs() <= 1e-9 * reference.max(1e-6), "{alpha} {xi:?}: {p} vs {reference}");
    }
}

#[test]
fn enumeration_matches_oracle_within_truncation() {
    let params = ProtocolParams::default();
    for &alpha in &ALPHAS {
        let cfg = SamplingConfig::new(alpha, 0).unwrap();
        for n in 1..=2 {
            let r = enumerate_probability(&params, &cfg, n, Target::Feasible).unwrap();
            let exact = feasible_probability(alpha, n, DEFAULT_XI);
            let slack = r.truncated_mass.unwrap();
            assert!(r.p_hat <= exact + 1e-12, "enumeration must be a lower bound");
            assert!(exact - r.p_hat <= slack + 1e-12, "alpha={alpha} n={n}: {} vs {exact}", r.p_hat);
            assert!(slack < 1e-5);
        }
    }
}

#[test]
fn enumeration_handles_other_designs() {
    let cfg = SamplingConfig::new(0.35, 0).unwrap();
    for xi in [(0u32, 4u64, 0u64), (15, 5, 8), (32, 20, 60)] {
        let params = ProtocolParams::new(xi.0, xi.1, xi.2).unwrap();
        let r = enumerate_probability(&params, &cfg, 2, Target::Feasible).unwrap();
        let exact = feasible_probability(0.35, 2, xi);
        assert!(exact - r.p_hat <= r.truncated_mass.unwrap() + 1e-12 && r.p_hat <= exact + 1e-12, "{xi:?}");
    }
}

#[test]
fn coarser_pruning_gives_a_certified_lower_bound() {
    let params = ProtocolParams::default();
    let cfg = SamplingConfig::new(0.3, 0).unwrap();
    let options = EnumOptions {
        prune: 1e-6,
        ..EnumOptions::default()
    };
    let r = enumerate_with(&params, &cfg, 3, Target::Feasible, options).unwrap();
    let exact = feasible_probability(0.3, 3, DEFAULT_XI);
    let slack = r.truncated_mass.unwrap();
    assert!(r.p_hat <= exact + 1e-12);
    assert!(exact - r.p_hat <= slack + 1e-12);
    assert!(matches!(
        enumerate_probability(&params, &cfg, 3, Target::Feasible),
        Err(reorg_core::Error::BudgetExceeded { .. })
    ));
}
