//! Value parsers that turn out-of-range flags into usage errors.

use reorg_core::sweep::{parse_design, Design, GridRange};
use reorg_core::ProtocolParams;
use serde::Serialize;

pub fn stake(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v < 0.5 {
        Ok(v)
    } else {
        Err(format!("alpha must lie in (0, 0.5), got {s}"))
    }
}

/// Like [`stake`], but 0 (no attacker) is allowed.
pub fn stake_or_zero(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (0.0..0.5).contains(&v) {
        Ok(v)
    } else {
        Err(format!("alpha must lie in [0, 0.5), got {s}"))
    }
}

pub fn weight(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("beta must lie in [0, 1], got {s}"))
    }
}

pub fn params(s: &str) -> Result<ProtocolParams, String> {
    s.parse()
}

/// A `;`-separated list of designs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct DesignList(pub Vec<Design>);

/// `EI,DE,DP;EI,DE,DP;...`
pub fn designs(s: &str) -> Result<DesignList, String> {
    s.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|t| parse_design(t.trim()).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()
        .map(DesignList)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct WeightList(pub Vec<f64>);

/// `LO:HI:STEP` over weights, e.g. `0.1:0.9:0.1`, or a comma list.
pub fn weight_list(s: &str) -> Result<WeightList, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let values = if parts.len() == 3 {
        let [lo, hi, step] = [parts[0], parts[1], parts[2]].map(|t| t.trim().parse::<f64>());
        let (lo, hi, step) = match (lo, hi, step) {
            (Ok(lo), Ok(hi), Ok(step)) if step > 0.0 && lo <= hi => (lo, hi, step),
            _ => return Err(format!("`{s}` is not LO:HI:STEP with LO <= HI and STEP > 0")),
        };
        let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| reorg_core::format::round_sig(lo + i as f64 * step, 10))
            .collect()
    } else {
        s.split(',').map(|t| weight(t.trim())).collect::<Result<Vec<_>, _>>()?
    };
    for &v in &values {
        weight(&v.to_string())?;
    }
    Ok(WeightList(values))
}

/// `ei=LO:HI:STEP,de=LO:HI:STEP,dp=LO:HI:STEP`; missing axes keep their
/// defaults.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub ei: GridRange,
    pub de: GridRange,
    pub dp: GridRange,
}

impl Default for GridSpec {
    fn default() -> Self {
        let g = reorg_core::SweepGrid::new(0.25, 0.5);
        GridSpec {
            ei: g.ei_range,
            de: g.de_range,
            dp: g.dp_range,
        }
    }
}

pub fn grid(s: &str) -> Result<GridSpec, String> {
    let mut spec = GridSpec::default();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (axis, range) = part
            .split_once('=')
            .ok_or_else(|| format!("grid axis `{part}` is not NAME=LO:HI:STEP"))?;
        let range: GridRange = range.parse().map_err(|e: reorg_core::Error| e.to_string())?;
        match axis.trim() {
            "ei" => {
                if range.hi > 32 {
                    return Err(format!("ei values must not exceed 32, got {}", range.hi));
                }
                spec.ei = range
            }
            "de" => spec.de = range,
            "dp" => spec.dp = range,
            other => return Err(format!("unknown grid axis `{other}` (expected ei, de, or dp)")),
        }
    }
    Ok(spec)
}
