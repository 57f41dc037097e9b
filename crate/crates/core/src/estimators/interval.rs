//! Confidence intervals.

use crate::special::beta_quantile;

/// Two-sided normal quantile used for 99% intervals.
pub const Z_99: f64 = 2.58;

/// Exact (Clopper-Pearson) interval for `hits` successes in `trials`
/// Bernoulli trials at the given confidence level.
pub fn clopper_pearson(hits: u64, trials: u64, confidence: f64) -> (f64, f64) {
    assert!(hits <= trials && trials > 0, "need 0 <= hits <= trials and trials > 0");
    let tail = (1.0 - confidence) / 2.0;
    let k = hits as f64;
    let n = trials as f64;
    let lower = if hits == 0 {
        0.0
    } else {
        beta_quantile(tail, k, n - k + 1.0)
    };
    let upper = if hits == trials {
        1.0
    } else {
        beta_quantile(1.0 - tail, k + 1.0, n - k)
    };
    (lower, upper)
}

/// `mean ± Z_99 · sd / √count`.
pub fn normal_interval(mean: f64, sd: f64, count: f64) -> (f64, f64) {
    let half = Z_99 * sd / count.sqrt();
    (mean - half, mean + half)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn zero_hits_upper_bound_is_closed_form() {
        let (lo, hi) = clopper_pearson(0, 10, 0.99);
        assert_eq!(lo, 0.0);
        assert!(close(hi, 1.0 - 0.005f64.powf(0.1), 1e-9));
        assert!(close(hi, 0.411_295_981_347_525_3, 1e-9));
    }

    #[test]
    fn all_hits_lower_bound_is_closed_form() {
        let (lo, hi) = clopper_pearson(10, 10, 0.99);
        assert_eq!(hi, 1.0);
        assert!(close(lo, 0.005f64.powf(0.1), 1e-9));
    }

    #[test]
    fn matches_reference_values() {
        // scipy.stats.beta.ppf reference values.
        let cases = [
            (3, 10, 0.037_007_221_096_232_09, 0.735_113_985_287_130_7),
            (50, 1000, 0.033_926_662_710_220_275, 0.070_504_375_201_458_12),
            (5, 100_000, 1.077_943_989_917_500_7e-5, 1.414_911_208_879_221_7e-4),
            (811_570, 10_000_000, 0.080_934_715_508_974_91, 0.081_379_683_069_362_39),
        ];
        for (k, n, lo_ref, hi_ref) in cases {
            let (lo, hi) = clopper_pearson(k, n, 0.99);
            assert!(close(lo, lo_ref, 1e-8), "{k}/{n}: {lo} vs {lo_ref}");
            assert!(close(hi, hi_ref, 1e-8), "{k}/{n}: {hi} vs {hi_ref}");
        }
    }
}
