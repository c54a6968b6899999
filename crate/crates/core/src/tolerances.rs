//! Pinned numeric tolerances shared by the suites and the acceptance tests.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative determinant tolerance for a normalized map.
pub const DET_RELATIVE: f64 = 1e-12;
/// Euclidean distance of `h_n(S_{−n})` from `S_n`.
pub const PINGPONG_ON_CIRCLE: f64 = 1e-9;
/// Slack on `Im(γ(i)) ≤ 1`.
pub const HEIGHT_SLACK: f64 = 1e-9;
/// Words with `||trace| − 2|` below this count as parabolic.
pub const PARABOLIC_TRACE: f64 = 1e-9;
/// Distance of the last generator height from `1/δ²`.
pub const HEIGHT_LIMIT: f64 = 2e-3;
/// Smallest index used when certifying the height and Busemann limits.
pub const LIMIT_MIN_INDEX: u64 = 1500;
/// Agreement between closed-form and direct distance evaluations.
pub const CLOSED_FORM_AGREEMENT: f64 = 1e-8;
/// Slack on the empirical injectivity estimate against its lower bound.
pub const FINENESS_SLACK: f64 = 1e-6;
/// Busemann limit over the generators against `2 ln δ`.
pub const BUSEMANN_GENERATOR_LIMIT: f64 = 2e-3;
/// Busemann limit over the two-letter family against `2 ln(δ(δ+1))`.
pub const BUSEMANN_PAIR_LIMIT: f64 = 1e-2;
/// Acceptance window of `detect_time`.
pub const DETECT_TIME: f64 = 2e-2;
/// `|γ(∞)|` must exceed this for a return-time witness.
pub const ENDPOINT_THRESHOLD: f64 = 1e3;
/// Relative agreement of the Fibonacci recurrence with its closed form.
pub const FIBONACCI_RELATIVE: f64 = 1e-9;
/// The `α, β` closed form at `n = 1` is off by `ln δ` to this accuracy.
pub const FIBONACCI_DISCREPANCY: f64 = 1e-9;

/// Every tolerance with its configuration key.
pub const ALL: &[(&str, f64)] = &[
    ("det_relative", DET_RELATIVE),
    ("pingpong_on_circle", PINGPONG_ON_CIRCLE),
    ("height_slack", HEIGHT_SLACK),
    ("parabolic_trace", PARABOLIC_TRACE),
    ("height_limit", HEIGHT_LIMIT),
    ("closed_form_agreement", CLOSED_FORM_AGREEMENT),
    ("fineness_slack", FINENESS_SLACK),
    ("busemann_generator_limit", BUSEMANN_GENERATOR_LIMIT),
    ("busemann_pair_limit", BUSEMANN_PAIR_LIMIT),
    ("detect_time", DETECT_TIME),
    ("endpoint_threshold", ENDPOINT_THRESHOLD),
    ("fibonacci_relative", FIBONACCI_RELATIVE),
    ("fibonacci_discrepancy", FIBONACCI_DISCREPANCY),
];

/// Named tolerances, starting from the pinned defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        Self(ALL.iter().map(|&(k, v)| (k.to_owned(), v)).collect())
    }
}

impl Tolerances {
    pub fn get(&self, name: &str) -> f64 {
        self.0[name]
    }

    /// Overrides one tolerance; unknown names and non-positive values are rejected.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !self.0.contains_key(name) {
            return Err(Error::InvalidParameter(format!("unknown tolerance {name:?}")));
        }
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "tolerance {name} = {value} must be positive"
            )));
        }
        self.0.insert(name.to_owned(), value);
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, &v)| (k.as_str(), v))
    }
}
