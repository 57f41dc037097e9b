//! Fixed numeric formatting for everything the tools print: probabilities
//! to 10 significant digits, XTZ amounts to 7 decimal places, seconds as
//! integers.

use serde::Serializer;

/// Rounds `x` to `digits` significant digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let text = format!("{:.*e}", digits.saturating_sub(1), x);
    text.parse().unwrap_or(x)
}

/// Rounds an amount of XTZ to 7 decimal places.
pub fn round_xtz(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let text = format!("{x:.7}");
    text.parse().unwrap_or(x)
}

/// A probability as text, 10 significant digits in shortest form.
pub fn prob_text(x: f64) -> String {
    if x.is_nan() {
        return "NaN".to_string();
    }
    format!("{}", round_sig(x, 10))
}

/// An XTZ amount as text with exactly 7 decimals.
pub fn xtz_text(x: f64) -> String {
    format!("{x:.7}")
}

pub mod serde_prob {
    use super::*;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(round_sig(*x, 10))
    }
}

pub mod serde_opt_prob {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => s.serialize_f64(round_sig(*v, 10)),
            None => s.serialize_none(),
        }
    }
}

pub mod serde_opt_xtz {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => s.serialize_f64(round_xtz(*v)),
            None => s.serialize_none(),
        }
    }
}
