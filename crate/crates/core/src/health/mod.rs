//! Backward-looking chain health.
//!
//! For the last `k` published blocks, compare how long the honest network
//! actually took with the fastest an attacker could have rebuilt them:
//! taking priority 0 wherever the honest baker did not (priority 1
//! otherwise), all 32 endorsements on its first block, and only the
//! endorsements the honest blocks lacked afterwards. With
//! `Δ_k = attacker − honest`, the health is `min_k Δ_k / k` over the window,
//! or 0 as soon as some `Δ_k ≤ 0`. Larger is healthier; a chain of
//! priority-0 blocks with full endorsements scores 40 under the default
//! design.

mod io;
mod simulate;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::{Priority, ProtocolParams, Seconds, ENDORSERS_PER_BLOCK};

pub use io::{read_chain, read_events, write_chain, write_events};
pub use simulate::{simulate_chain, SimulationConfig, SimulationOutput, TracePoint};

/// Default window of security, in blocks.
pub const DEFAULT_WINDOW: usize = 40;

/// One published block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainRecord {
    pub slot: u64,
    /// Priority the block was baked at.
    pub priority: Priority,
    /// Endorsements of the previous slot included in this block.
    pub endorsements: u32,
}

impl ChainRecord {
    pub fn new(slot: u64, priority: Priority, endorsements: u32) -> Result<Self> {
        let r = ChainRecord {
            slot,
            priority,
            endorsements,
        };
        r.validate()?;
        Ok(r)
    }

    /// Priority 0 with every endorsement.
    pub fn ideal(slot: u64) -> Self {
        ChainRecord {
            slot,
            priority: 0,
            endorsements: ENDORSERS_PER_BLOCK,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.endorsements > ENDORSERS_PER_BLOCK {
            return Err(Error::EndorsementsOutOfRange {
                count: self.endorsements,
                max: ENDORSERS_PER_BLOCK,
            });
        }
        Ok(())
    }
}

/// A contiguous run of published blocks and the window the metric scans.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainHistory {
    records: Vec<ChainRecord>,
    window: usize,
}

impl ChainHistory {
    pub fn new(records: Vec<ChainRecord>, window: usize) -> Result<Self> {
        if window < 2 {
            return Err(Error::WindowTooSmall(window));
        }
        if records.is_empty() {
            return Err(Error::EmptyHistory);
        }
        for r in &records {
            r.validate()?;
        }
        for pair in records.windows(2) {
            if pair[1].slot != pair[0].slot + 1 {
                return Err(Error::NonConsecutiveSlots {
                    previous: pair[0].slot,
                    found: pair[1].slot,
                });
            }
        }
        Ok(ChainHistory { records, window })
    }

    /// `len` ideal blocks starting at slot 0.
    pub fn ideal(len: usize, window: usize) -> Result<Self> {
        Self::new((0..len as u64).map(ChainRecord::ideal).collect(), window)
    }

    pub fn records(&self) -> &[ChainRecord] {
        &self.records
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn with_window(mut self, window: usize) -> Result<Self> {
        if window < 2 {
            return Err(Error::WindowTooSmall(window));
        }
        self.window = window;
        Ok(self)
    }

    pub fn into_records(self) -> Vec<ChainRecord> {
        self.records
    }

    /// Deepest `k` the metric looks at.
    pub fn max_depth(&self) -> usize {
        self.window.min(self.records.len()).saturating_sub(1)
    }

    fn check_depth(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.max_depth() {
            return Err(Error::InsufficientHistory {
                depth: k,
                available: self.records.len(),
                window: self.window,
            });
        }
        Ok(())
    }
}

/// A malicious reorg carried out by the simulated attacker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackEvent {
    /// Slot of the last fork block; the fork point is `fork_length` earlier.
    pub executed_at: u64,
    pub fork_length: usize,
}

impl AttackEvent {
    /// Public blocks deleted by the reorg.
    pub fn deleted(&self) -> usize {
        self.fork_length.saturating_sub(1)
    }

    pub fn fork_point(&self) -> u64 {
        self.executed_at - self.fork_length as u64
    }
}

/// The attacker's best priority at a height where the honest baker used
/// `honest`: the free priority 0, or 1 when the honest baker had it.
#[inline]
fn potential_priority(honest: Priority) -> Priority {
    Priority::from(honest == 0)
}

/// Seconds the last `k` blocks took.
pub fn honest_backward_time(params: &ProtocolParams, hist: &ChainHistory, k: usize) -> Result<Seconds> {
    hist.check_depth(k)?;
    Ok(hist.records[hist.len() - k..]
        .iter()
        .map(|r| params.delay_unchecked(r.priority, r.endorsements))
        .sum())
}

/// Fastest an attacker could have produced the last `k` blocks from the
/// block before them.
pub fn attacker_backward_time(params: &ProtocolParams, hist: &ChainHistory, k: usize) -> Result<Seconds> {
    hist.check_depth(k)?;
    let tail = &hist.records[hist.len() - k..];
    let first = params.delay_unchecked(potential_priority(tail[0].priority), ENDORSERS_PER_BLOCK);
    let rest: Seconds = tail[1..]
        .iter()
        .map(|r| params.delay_unchecked(potential_priority(r.priority), ENDORSERS_PER_BLOCK - r.endorsements))
        .sum();
    Ok(first + rest)
}

/// `Δ_k` for `k = 1..=max_depth`.
pub fn deltas(params: &ProtocolParams, hist: &ChainHistory) -> Result<Vec<Seconds>> {
    if hist.max_depth() == 0 {
        return Err(Error::InsufficientHistory {
            depth: 1,
            available: hist.len(),
            window: hist.window,
        });
    }
    Ok(deltas_of(params, &hist.records, hist.window))
}

/// Chain health of the newest block.
pub fn health(params: &ProtocolParams, hist: &ChainHistory) -> Result<f64> {
    Ok(health_from_deltas(&deltas(params, hist)?))
}

/// Health after every block from the second on, as `(slot, health)`.
pub fn health_trace(params: &ProtocolParams, hist: &ChainHistory) -> Vec<(u64, f64)> {
    (2..=hist.len())
        .map(|end| {
            let prefix = &hist.records[..end];
            (prefix[end - 1].slot, health_of(params, prefix, hist.window))
        })
        .collect()
}

/// Health of the newest record in `records` (at least two of them).
pub(crate) fn health_of(params: &ProtocolParams, records: &[ChainRecord], window: usize) -> f64 {
    health_from_deltas(&deltas_of(params, records, window))
}

fn health_from_deltas(deltas: &[Seconds]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, &d) in deltas.iter().enumerate() {
        if d <= 0 {
            return 0.0;
        }
        best = best.min(d as f64 / (i + 1) as f64);
    }
    best
}

/// Incremental `Δ_k`: extending the span by one block moves the old first
/// block into the "rest" role and adds a new first block.
fn deltas_of(params: &ProtocolParams, records: &[ChainRecord], window: usize) -> Vec<Seconds> {
    let depth = window.min(records.len()).saturating_sub(1);
    let mut out = Vec::with_capacity(depth);
    let mut honest = 0;
    let mut attacker_rest = 0;
    for k in 1..=depth {
        let r = &records[records.len() - k];
        honest += params.delay_unchecked(r.priority, r.endorsements);
        let potential = potential_priority(r.priority);
        let first = params.delay_unchecked(potential, ENDORSERS_PER_BLOCK);
        out.push(first + attacker_rest - honest);
        attacker_rest += params.delay_unchecked(potential, ENDORSERS_PER_BLOCK - r.endorsements);
    }
    out
}

/// Descriptive statistics of a run of blocks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineStats {
    pub blocks: usize,
    pub priority_zero_fraction: f64,
    pub endorsement_mean: f64,
    /// Population standard deviation.
    pub endorsement_std: f64,
}

pub fn baseline_statistics(records: &[ChainRecord]) -> Result<BaselineStats> {
    if records.is_empty() {
        return Err(Error::EmptyHistory);
    }
    let n = records.len() as f64;
    let top = records.iter().filter(|r| r.priority == 0).count() as f64;
    let mean = records.iter().map(|r| f64::from(r.endorsements)).sum::<f64>() / n;
    let var = records
        .iter()
        .map(|r| (f64::from(r.endorsements) - mean).powi(2))
        .sum::<f64>()
        / n;
    Ok(BaselineStats {
        blocks: records.len(),
        priority_zero_fraction: top / n,
        endorsement_mean: mean,
        endorsement_std: var.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> ProtocolParams {
        ProtocolParams::default()
    }

    fn chain(records: &[(u32, u32)]) -> ChainHistory {
        let recs = records
            .iter()
            .enumerate()
            .map(|(i, &(prio, e))| ChainRecord::new(i as u64, prio, e).unwrap())
            .collect();
        ChainHistory::new(recs, DEFAULT_WINDOW).unwrap()
    }

    #[test]
    fn honest_time_examples() {
        let ideal = ChainHistory::ideal(10, 40).unwrap();
        assert_eq!(honest_backward_time(&p(), &ideal, 3).unwrap(), 180);
        let bumped = chain(&[(0, 32), (0, 32), (1, 32), (0, 32)]);
        assert_eq!(honest_backward_time(&p(), &bumped, 2).unwrap(), 120 + 40);
        let starved = chain(&[(0, 32), (0, 0)]);
        assert_eq!(honest_backward_time(&p(), &starved, 1).unwrap(), 252);
    }

    #[test]
    fn attacker_time_examples() {
        let ideal = ChainHistory::ideal(10, 40).unwrap();
        assert_eq!(attacker_backward_time(&p(), &ideal, 1).unwrap(), 100);
        assert_eq!(attacker_backward_time(&p(), &ideal, 2).unwrap(), 392);
        let late = chain(&[(0, 32), (1, 32)]);
        assert_eq!(attacker_backward_time(&p(), &late, 1).unwrap(), 60);
    }

    #[test]
    fn depth_is_bounded_by_window_and_history() {
        let short = ChainHistory::ideal(3, 40).unwrap();
        assert!(honest_backward_time(&p(), &short, 2).is_ok());
        assert!(matches!(honest_backward_time(&p(), &short, 3), Err(Error::InsufficientHistory { .. })));
        assert!(honest_backward_time(&p(), &short, 0).is_err());
        let long = ChainHistory::ideal(100, 5).unwrap();
        assert!(attacker_backward_time(&p(), &long, 4).is_ok());
        assert!(attacker_backward_time(&p(), &long, 5).is_err());
        assert!(health(&p(), &ChainHistory::ideal(1, 40).unwrap()).is_err());
    }

    #[test]
    fn ideal_chain_health() {
        let ideal = ChainHistory::ideal(60, 40).unwrap();
        let d = deltas(&p(), &ideal).unwrap();
        assert_eq!(d.len(), 39);
        for (i, delta) in d.iter().enumerate() {
            assert_eq!(*delta, 232 * (i as i64 + 1) - 192);
        }
        assert_eq!(health(&p(), &ideal).unwrap(), 40.0);
    }

    #[test]
    fn starved_block_is_unhealthy() {
        let starved = chain(&[(0, 32), (0, 32), (0, 0)]);
        assert_eq!(deltas(&p(), &starved).unwrap()[0], -152);
        assert_eq!(health(&p(), &starved).unwrap(), 0.0);
    }

    #[test]
    fn single_late_block_keeps_chain_healthy() {
        let mut recs: Vec<(u32, u32)> = vec![(0, 32); 30];
        recs[20] = (1, 32);
        let h = health(&p(), &chain(&recs)).unwrap();
        assert!(h > 0.0 && h <= 40.0);
    }

    #[test]
    fn incremental_deltas_match_direct_sums() {
        let recs = [(0, 32), (2, 30), (0, 17), (0, 32), (1, 5), (0, 28), (0, 32), (3, 32)];
        let hist = chain(&recs);
        let d = deltas(&p(), &hist).unwrap();
        for k in 1..hist.len() {
            let direct = attacker_backward_time(&p(), &hist, k).unwrap() - honest_backward_time(&p(), &hist, k).unwrap();
            assert_eq!(d[k - 1], direct);
        }
    }

    #[test]
    fn history_validation() {
        assert!(matches!(ChainHistory::new(vec![], 40), Err(Error::EmptyHistory)));
        assert!(matches!(ChainHistory::ideal(3, 1), Err(Error::WindowTooSmall(1))));
        let gap = vec![ChainRecord::ideal(0), ChainRecord::ideal(2)];
        assert!(matches!(ChainHistory::new(gap, 40), Err(Error::NonConsecutiveSlots { previous: 0, found: 2 })));
        assert!(ChainRecord::new(0, 0, 33).is_err());
    }

    #[test]
    fn baseline_of_ideal_chain() {
        let stats = baseline_statistics(ChainHistory::ideal(50, 40).unwrap().records()).unwrap();
        assert_eq!(stats.priority_zero_fraction, 1.0);
        assert_eq!(stats.endorsement_mean, 32.0);
        assert_eq!(stats.endorsement_std, 0.0);
        assert!(baseline_statistics(&[]).is_err());
    }

    #[test]
    fn trace_covers_every_block_after_the_first() {
        let hist = ChainHistory::ideal(12, 40).unwrap();
        let trace = health_trace(&p(), &hist);
        assert_eq!(trace.len(), 11);
        assert_eq!(trace[0].0, 1);
        assert!(trace.iter().all(|&(_, h)| h == 40.0));
    }

    #[test]
    fn event_bookkeeping() {
        let ev = AttackEvent {
            executed_at: 30,
            fork_length: 8,
        };
        assert_eq!(ev.deleted(), 7);
        assert_eq!(ev.fork_point(), 22);
    }
}
