//! Estimators of the probability that a length-n attack is feasible or a
//! profitable selfish mine, and of the mean cost of feasible attacks.
//!
//! * [`enumerate_probability`] sums exact state probabilities over a
//!   truncated domain. It is the oracle for short attacks.
//! * [`mc_estimate`] counts hits among states drawn at the true stake and
//!   reports a 99% Clopper-Pearson interval.
//! * [`is_estimate`] draws states at an inflated proposal stake and
//!   reweights hits by their likelihood ratio, for rare events.
//!
//! Sampling estimators split their work into chunks with independent
//! random streams (see [`crate::rng`]) and reduce the per-chunk tallies in
//! chunk order, so results depend on the seed and chunk size only.

mod enumerate;
mod importance;
pub mod interval;
mod monte_carlo;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::{serde_opt_prob, serde_opt_xtz, serde_prob};

pub use enumerate::{enumerate_probability, enumerate_with, EnumOptions};
pub use importance::{is_estimate, is_estimate_chunked};
pub use interval::{clopper_pearson, Z_99};
pub use monte_carlo::{mc_estimate, mc_estimate_chunked};

/// Confidence level of every reported interval.
pub const CONFIDENCE: f64 = 0.99;

/// Default smallest per-sample likelihood ratio that is still trusted.
pub const DEFAULT_LR_FLOOR: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Enum,
    Mc,
    Is,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Enum => "enum",
            Method::Mc => "mc",
            Method::Is => "is",
        })
    }
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "enum" => Ok(Method::Enum),
            "mc" => Ok(Method::Mc),
            "is" => Ok(Method::Is),
            other => Err(format!("unknown method `{other}` (expected enum, mc, or is)")),
        }
    }
}

/// The event or quantity being estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// The attack is feasible.
    Feasible,
    /// The attack is feasible and earns more than honest play.
    Profitable,
    /// Mean cost of the attack, conditional on feasibility.
    MeanCost,
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::Feasible => "feasible",
            Target::Profitable => "profitable",
            Target::MeanCost => "mean-cost",
        })
    }
}

impl FromStr for Target {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "feasible" => Ok(Target::Feasible),
            "profitable" => Ok(Target::Profitable),
            "mean-cost" | "mean_cost" => Ok(Target::MeanCost),
            other => Err(format!("unknown target `{other}` (expected feasible, profitable, or mean-cost)")),
        }
    }
}

/// One probability estimate with its 99% interval.
///
/// For [`Target::MeanCost`] the probability fields describe feasibility and
/// `mean_cost` holds the conditional mean in XTZ; it is absent when no
/// feasible state was seen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub method: Method,
    pub target: Target,
    pub alpha: f64,
    pub n: usize,
    /// Design tuple as `EI,DE,DP`.
    pub params: String,
    /// Samples drawn, or states visited for enumeration.
    pub samples: u64,
    pub seed: u64,
    /// Samples in which the event held.
    pub hits: u64,
    #[serde(serialize_with = "serde_prob::serialize")]
    pub p_hat: f64,
    #[serde(serialize_with = "serde_prob::serialize")]
    pub ci_low: f64,
    #[serde(serialize_with = "serde_prob::serialize")]
    pub ci_high: f64,
    #[serde(default, skip_serializing_if = "Option::is_none", serialize_with = "serde_opt_xtz::serialize")]
    pub mean_cost: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", serialize_with = "serde_opt_xtz::serialize")]
    pub mean_cost_ci_low: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", serialize_with = "serde_opt_xtz::serialize")]
    pub mean_cost_ci_high: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_q: Option<f64>,
    /// Importance samples whose likelihood ratio fell below the floor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lr_floor_violations: Option<u64>,
    /// Probability mass outside the enumerated domain.
    #[serde(default, skip_serializing_if = "Option::is_none", serialize_with = "serde_opt_prob::serialize")]
    pub truncated_mass: Option<f64>,
}

impl EstimateResult {
    /// Half the interval width.
    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci_high - self.ci_low)
    }

    pub fn contains(&self, p: f64) -> bool {
        self.ci_low <= p && p <= self.ci_high
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("estimate serializes")
    }
}

/// Proposal distribution for importance sampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ISConfig {
    alpha_q: f64,
    lr_floor: f64,
    identity: bool,
}

impl ISConfig {
    /// Proposal at stake `alpha_q`, which must exceed the target stake.
    pub fn new(alpha: f64, alpha_q: f64) -> Result<Self> {
        Self::with_floor(alpha, alpha_q, DEFAULT_LR_FLOOR)
    }

    pub fn with_floor(alpha: f64, alpha_q: f64, lr_floor: f64) -> Result<Self> {
        if !(alpha_q > alpha) {
            return Err(Error::ProposalNotInflated { alpha, alpha_q });
        }
        if !(alpha_q < 0.5) {
            return Err(Error::OutOfRange {
                name: "alpha_q",
                value: alpha_q,
                expected: "below 0.5",
            });
        }
        if !(lr_floor > 0.0) {
            return Err(Error::OutOfRange {
                name: "lr_floor",
                value: lr_floor,
                expected: "positive",
            });
        }
        Ok(ISConfig {
            alpha_q,
            lr_floor,
            identity: false,
        })
    }

    /// The degenerate proposal `alpha_q = alpha`. Every likelihood ratio is
    /// exactly 1 and the draws coincide with [`mc_estimate`]'s; useful only
    /// as a consistency check.
    pub fn identity(alpha: f64) -> Self {
        ISConfig {
            alpha_q: alpha,
            lr_floor: DEFAULT_LR_FLOOR,
            identity: true,
        }
    }

    /// The default heuristic proposal for `(alpha, n)`.
    pub fn heuristic(alpha: f64, n: usize) -> Result<Self> {
        Self::new(alpha, choose_alpha_q(alpha, n))
    }

    pub fn alpha_q(&self) -> f64 {
        self.alpha_q
    }

    pub fn lr_floor(&self) -> f64 {
        self.lr_floor
    }

    fn check(&self, alpha: f64) -> Result<()> {
        if self.identity {
            if self.alpha_q == alpha {
                return Ok(());
            }
        } else if self.alpha_q > alpha {
            return Ok(());
        }
        Err(Error::ProposalNotInflated {
            alpha,
            alpha_q: self.alpha_q,
        })
    }
}

/// Shifted proposal stake: `α + 0.05` up to length 35, `α + 0.03` beyond,
/// kept below one half.
pub fn choose_alpha_q(alpha: f64, n: usize) -> f64 {
    let shift = if n <= 35 { 0.05 } else { 0.03 };
    let q = alpha + shift;
    // Two decimals of shift arithmetic should not leave float dust behind.
    let q = (q * 1e12).round() / 1e12;
    q.min(0.4999)
}

fn check_length(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::EmptyState)
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_q_heuristic() {
        assert_eq!(choose_alpha_q(0.30, 20), 0.35);
        assert_eq!(choose_alpha_q(0.30, 35), 0.35);
        assert_eq!(choose_alpha_q(0.30, 55), 0.33);
        assert_eq!(choose_alpha_q(0.48, 20), 0.4999);
    }

    #[test]
    fn proposal_must_inflate_stake() {
        assert!(ISConfig::new(0.3, 0.3).is_err());
        assert!(ISConfig::new(0.3, 0.25).is_err());
        assert!(ISConfig::new(0.3, 0.5).is_err());
        assert!(ISConfig::with_floor(0.3, 0.35, 0.0).is_err());
        let cfg = ISConfig::new(0.3, 0.35).unwrap();
        assert_eq!(cfg.alpha_q(), 0.35);
        assert_eq!(cfg.lr_floor(), 1e-16);
        assert!(cfg.check(0.3).is_ok());
        assert!(cfg.check(0.36).is_err());
        assert!(ISConfig::identity(0.3).check(0.3).is_ok());
        assert!(ISConfig::identity(0.3).check(0.2).is_err());
    }

    #[test]
    fn names_round_trip() {
        for m in [Method::Enum, Method::Mc, Method::Is] {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
        for t in [Target::Feasible, Target::Profitable, Target::MeanCost] {
            assert_eq!(t.to_string().parse::<Target>().unwrap(), t);
        }
        assert!("median".parse::<Target>().is_err());
    }
}
