//! Independent oracle: the exact distribution of the attacker-minus-honest
//! race time, built by convolving per-slot distributions on an integer
//! lattice. It shares no code with the crate beyond the design triple.
#![allow(dead_code)]

pub const ALPHAS: [f64; 8] = [0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45];

/// Two-slot feasibility at the stakes above, from a separate Python
/// convolution (no pruning).
pub const F2_REFERENCE: [f64; 8] = [
    0.000_142_218_393_887_764_58,
    0.001_418_932_565_369_829_4,
    0.007_788_913_661_956_736_6,
    0.029_502_201_880_082_533,
    0.081_156_796_667_830_81,
    0.176_913_204_298_855_68,
    0.323_585_250_564_209_4,
    0.504_534_544_778_324_9,
];

fn delay(xi: (u32, u64, u64), p: u64, e: u32) -> i64 {
    let (ei, de, dp) = xi;
    (60 + dp * p + de * u64::from(ei.saturating_sub(e))) as i64
}

fn binom_pmf(alpha: f64) -> Vec<f64> {
    let mut c = 1.0f64;
    (0..=32u32)
        .map(|k| {
            if k > 0 {
                c = c * f64::from(33 - k) / f64::from(k);
            }
            c * alpha.powi(k as i32) * (1.0 - alpha).powi(32 - k as i32)
        })
        .collect()
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

struct Dense {
    lo: i64,
    p: Vec<f64>,
}

fn slot_distribution(alpha: f64, xi: (u32, u64, u64), first: bool, unit: i64) -> Dense {
    let pe = binom_pmf(alpha);
    let mut pts: Vec<(i64, f64)> = Vec::new();
    // Priorities beyond this carry less than 1e-18 of mass.
    let cap = 200u64;
    for h in 1..=cap {
        let ph = alpha.powi(h as i32) * (1.0 - alpha);
        if ph < 1e-18 {
            break;
        }
        for e in 0..=32u32 {
            let ea = if first { 32 } else { e };
            pts.push((delay(xi, 0, ea) - delay(xi, h, 32 - e), ph * pe[e as usize]));
        }
    }
    for a in 1..=cap {
        let pa = (1.0 - alpha).powi(a as i32) * alpha;
        if pa < 1e-18 {
            break;
        }
        for e in 0..=32u32 {
            let ea = if first { 32 } else { e };
            pts.push((delay(xi, a, ea) - delay(xi, 0, 32 - e), pa * pe[e as usize]));
        }
    }
    let lo = pts.iter().map(|t| t.0).min().unwrap();
    let hi = pts.iter().map(|t| t.0).max().unwrap();
    let mut p = vec![0.0; ((hi - lo) / unit + 1) as usize];
    for (v, q) in pts {
        assert_eq!((v - lo) % unit, 0);
        p[((v - lo) / unit) as usize] += q;
    }
    Dense { lo, p }
}

fn convolve(a: &Dense, b: &Dense, unit: i64) -> Dense {
    let mut p = vec![0.0; a.p.len() + b.p.len() - 1];
    for (i, &x) in a.p.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.p.iter().enumerate() {
            p[i + j] += x * y;
        }
    }
    let _ = unit;
    Dense { lo: a.lo + b.lo, p }
}

/// Exact `Pr[F_n]` (up to 1e-18 per-slot truncation).
pub fn feasible_probability(alpha: f64, n: usize, xi: (u32, u64, u64)) -> f64 {
    let unit = gcd(xi.1, xi.2).max(1) as i64;
    let rest = slot_distribution(alpha, xi, false, unit);
    let mut acc = slot_distribution(alpha, xi, true, unit);
    for _ in 1..n {
        acc = convolve(&acc, &rest, unit);
    }
    acc.p
        .iter()
        .enumerate()
        .filter(|(i, _)| acc.lo + *i as i64 * unit <= 0)
        .map(|(_, q)| q)
        .sum()
}

pub const DEFAULT_XI: (u32, u64, u64) = (24, 8, 40);
