//! Protocol constants and the delay and reward rules every other module
//! evaluates.
//!
//! Time is counted in whole seconds. Rewards are fixed-point amounts in
//! units of 10⁻⁷ XTZ, which represents every reward constant exactly
//! (including the seven-digit endorsement reward at non-zero priority), so
//! cost comparisons never depend on float rounding.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Whole seconds.
pub type Seconds = i64;

/// Block priority; 0 is the best.
pub type Priority = u32;

/// Fixed-point reward amount in units of 10⁻⁷ XTZ.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Xtz(i64);

impl Xtz {
    pub const ZERO: Xtz = Xtz(0);
    /// Number of fixed-point units in one XTZ.
    pub const UNITS_PER_XTZ: i64 = 10_000_000;

    pub const fn from_units(units: i64) -> Self {
        Xtz(units)
    }

    pub const fn units(self) -> i64 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / Self::UNITS_PER_XTZ as f64
    }
}

impl fmt::Display for Xtz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        let scale = Self::UNITS_PER_XTZ as u64;
        write!(f, "{sign}{}.{:07}", abs / scale, abs % scale)
    }
}

impl Add for Xtz {
    type Output = Xtz;
    fn add(self, rhs: Xtz) -> Xtz {
        Xtz(self.0 + rhs.0)
    }
}

impl AddAssign for Xtz {
    fn add_assign(&mut self, rhs: Xtz) {
        self.0 += rhs.0;
    }
}

impl Sub for Xtz {
    type Output = Xtz;
    fn sub(self, rhs: Xtz) -> Xtz {
        Xtz(self.0 - rhs.0)
    }
}

impl Neg for Xtz {
    type Output = Xtz;
    fn neg(self) -> Xtz {
        Xtz(-self.0)
    }
}

impl Mul<u32> for Xtz {
    type Output = Xtz;
    fn mul(self, rhs: u32) -> Xtz {
        Xtz(self.0 * i64::from(rhs))
    }
}

impl Sum for Xtz {
    fn sum<I: Iterator<Item = Xtz>>(iter: I) -> Xtz {
        iter.fold(Xtz::ZERO, Add::add)
    }
}

/// The protocol design tuple (initial endorsers, per-endorsement delay,
/// per-priority delay) together with the constants that complete the delay
/// and reward rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProtocolParams {
    /// Endorsements a block needs to avoid the missing-endorsement penalty.
    pub initial_endorsers: u32,
    /// Seconds added per endorsement below `initial_endorsers`.
    pub delay_endorse: u64,
    /// Seconds added per step of priority.
    pub delay_priority: u64,
    pub base_delay: u64,
    pub endorsers_per_block: u32,
    /// Baker reward per included endorsement at priority 0.
    pub baker_reward_top: Xtz,
    /// Baker reward per included endorsement at any other priority.
    pub baker_reward_low: Xtz,
    /// Endorser reward when the including block has priority 0.
    pub endorser_reward_top: Xtz,
    /// Endorser reward when the including block has any other priority.
    pub endorser_reward_low: Xtz,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        ProtocolParams {
            initial_endorsers: 24,
            delay_endorse: 8,
            delay_priority: 40,
            base_delay: 60,
            endorsers_per_block: ENDORSERS_PER_BLOCK,
            baker_reward_top: Xtz::from_units(12_500_000),
            baker_reward_low: Xtz::from_units(1_875_000),
            endorser_reward_top: Xtz::from_units(12_500_000),
            endorser_reward_low: Xtz::from_units(8_333_333),
        }
    }
}

/// Endorsement slots per block height.
pub const ENDORSERS_PER_BLOCK: u32 = 32;

impl ProtocolParams {
    /// Default constants with the design tuple replaced.
    pub fn new(initial_endorsers: u32, delay_endorse: u64, delay_priority: u64) -> Result<Self> {
        let params = ProtocolParams {
            initial_endorsers,
            delay_endorse,
            delay_priority,
            ..ProtocolParams::default()
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.initial_endorsers > self.endorsers_per_block {
            return Err(Error::InitialEndorsersOutOfRange {
                initial: self.initial_endorsers,
                max: self.endorsers_per_block,
            });
        }
        Ok(())
    }

    /// The design tuple `(initial_endorsers, delay_endorse, delay_priority)`.
    pub fn design(&self) -> (u32, u64, u64) {
        (self.initial_endorsers, self.delay_endorse, self.delay_priority)
    }

    fn check_endorsements(&self, endorsements: u32) -> Result<()> {
        if endorsements > self.endorsers_per_block {
            return Err(Error::EndorsementsOutOfRange {
                count: endorsements,
                max: self.endorsers_per_block,
            });
        }
        Ok(())
    }

    /// Minimum seconds between a block baked at `priority` carrying
    /// `endorsements` endorsements and its predecessor.
    pub fn delay(&self, priority: Priority, endorsements: u32) -> Result<Seconds> {
        self.check_endorsements(endorsements)?;
        Ok(self.delay_unchecked(priority, endorsements))
    }

    /// [`delay`](Self::delay) without the endorsement bound check, for hot
    /// loops whose inputs are valid by construction.
    #[inline]
    pub(crate) fn delay_unchecked(&self, priority: Priority, endorsements: u32) -> Seconds {
        let missing = self.initial_endorsers.saturating_sub(endorsements);
        (self.base_delay + self.delay_priority * u64::from(priority) + self.delay_endorse * u64::from(missing))
            as Seconds
    }

    /// Reward paid to the baker of a block at `priority` with `endorsements`
    /// endorsements included.
    pub fn baker_reward(&self, priority: Priority, endorsements: u32) -> Result<Xtz> {
        self.check_endorsements(endorsements)?;
        Ok(self.baker_reward_unchecked(priority, endorsements))
    }

    #[inline]
    pub(crate) fn baker_reward_unchecked(&self, priority: Priority, endorsements: u32) -> Xtz {
        let rate = if priority == 0 {
            self.baker_reward_top
        } else {
            self.baker_reward_low
        };
        rate * endorsements
    }

    /// Reward for one endorsement included in a block baked at
    /// `including_priority`.
    pub fn endorser_reward(&self, including_priority: Priority) -> Xtz {
        if including_priority == 0 {
            self.endorser_reward_top
        } else {
            self.endorser_reward_low
        }
    }
}

impl fmt::Display for ProtocolParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.initial_endorsers, self.delay_endorse, self.delay_priority)
    }
}

impl std::str::FromStr for ProtocolParams {
    type Err = String;

    /// Parses `EI,DE,DP`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [ei, de, dp] = parts.as_slice() else {
            return Err(format!("expected EI,DE,DP (three comma-separated integers), got `{s}`"));
        };
        let ei: u32 = ei.parse().map_err(|_| format!("initial endorsers `{ei}` is not a non-negative integer"))?;
        let de: u64 = de.parse().map_err(|_| format!("endorsement delay `{de}` is not a non-negative integer"))?;
        let dp: u64 = dp.parse().map_err(|_| format!("priority delay `{dp}` is not a non-negative integer"))?;
        ProtocolParams::new(ei, de, dp).map_err(|e| e.to_string())
    }
}
