//! Return times: reals `t` with `g_t(u₀)` in the closure of the horocyclic
//! orbit of `u₀`.
//!
//! A time is witnessed by a group element `γ` with `|γ(∞)|` large and
//! `B_∞(γ⁻¹ i, i) = ln(a² + c²)` close to `t`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyperbolic::MoebiusMap;
use crate::schottky::{index_sequence, SurfaceParameter};
use crate::tolerances;
use crate::words::{par_fold_words, Alphabet, WordBudget};

use super::limits::{pair_family, GroupFamily, SecondIndex};

/// Search budgets for [`detect_time`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeSearch {
    /// Number of sequence generators `h_{p_1}, …, h_{p_depth}`.
    pub depth: usize,
    /// Longest word scanned over those generators.
    pub max_length: usize,
    /// `|γ(∞)|` must exceed this.
    pub endpoint_threshold: f64,
    /// Whether the two-letter family `h_{p_n} h_q` is scanned as well.
    pub include_pairs: bool,
    pub second_index: SecondIndex,
    pub budget: WordBudget,
}

impl Default for TimeSearch {
    fn default() -> Self {
        Self {
            depth: 20,
            max_length: 2,
            endpoint_threshold: tolerances::ENDPOINT_THRESHOLD,
            include_pairs: true,
            second_index: SecondIndex::RawSquare,
            budget: WordBudget::default(),
        }
    }
}

/// A candidate return time with its witness.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeEntry {
    pub t: f64,
    pub witness: String,
    pub family: GroupFamily,
    /// `|γ(∞)|`
    pub endpoint_size: f64,
    /// `B_∞(γ⁻¹ i, i)`
    pub busemann_value: f64,
    /// `|B_∞(γ⁻¹ i, i) − t|`
    pub busemann_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TimeDetection {
    Found(TimeEntry),
    NotFound { t: f64, closest: Option<TimeEntry> },
}

impl TimeDetection {
    pub fn is_found(&self) -> bool {
        matches!(self, TimeDetection::Found(_))
    }

    pub fn entry(&self) -> Option<&TimeEntry> {
        match self {
            TimeDetection::Found(e) => Some(e),
            TimeDetection::NotFound { closest, .. } => closest.as_ref(),
        }
    }
}

fn busemann_of(m: &MoebiusMap) -> Option<(f64, f64)> {
    (m.c() != 0.0).then(|| (2.0 * m.a().hypot(m.c()).ln(), (m.a() / m.c()).abs()))
}

#[derive(Clone, Default)]
struct Best {
    // admissible: endpoint above threshold
    admissible: Option<(f64, TimeEntry)>,
    closest: Option<(f64, TimeEntry)>,
}

impl Best {
    fn offer(mut self, err: f64, entry: impl FnOnce() -> TimeEntry, admissible: bool) -> Self {
        let better = |slot: &Option<(f64, TimeEntry)>| slot.as_ref().map_or(true, |(e, _)| err < *e);
        if admissible && better(&self.admissible) {
            let e = entry();
            if better(&self.closest) {
                self.closest = Some((err, e.clone()));
            }
            self.admissible = Some((err, e));
        } else if better(&self.closest) {
            self.closest = Some((err, entry()));
        }
        self
    }

    fn merge(self, other: Self) -> Self {
        let pick = |x: Option<(f64, TimeEntry)>, y: Option<(f64, TimeEntry)>| match (x, y) {
            (Some(a), Some(b)) => Some(if b.0 < a.0 { b } else { a }),
            (a, b) => a.or(b),
        };
        Self {
            admissible: pick(self.admissible, other.admissible),
            closest: pick(self.closest, other.closest),
        }
    }
}

/// Searches words over the sequence generators, then the two-letter family,
/// for a witness of the return time `t`.
///
/// Witnesses in the group generated by the sequence are preferred whenever
/// one is within `tol`; otherwise the best two-letter witness is taken.
pub fn detect_time(
    t: f64,
    delta: &SurfaceParameter,
    search: &TimeSearch,
    tol: f64,
) -> Result<TimeDetection> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    if search.depth == 0 || search.max_length == 0 {
        return Err(Error::InvalidParameter("time search needs positive budgets".into()));
    }
    let sequence = index_sequence(delta, search.depth)?;
    let alphabet = Alphabet::new(&sequence, search.depth)?;
    let threshold = search.endpoint_threshold;
    let words = par_fold_words(
        &alphabet,
        search.max_length,
        &search.budget,
        Best::default(),
        |best, w| match busemann_of(w.matrix()) {
            Some((b, end)) => {
                let err = (b - t).abs();
                best.offer(
                    err,
                    || TimeEntry {
                        t,
                        witness: alphabet.render(w),
                        family: GroupFamily::Gamma,
                        endpoint_size: end,
                        busemann_value: b,
                        busemann_error: err,
                    },
                    end > threshold,
                )
            }
            None => best,
        },
        Best::merge,
    )?;
    if let Some((err, entry)) = &words.admissible {
        if *err < tol {
            return Ok(TimeDetection::Found(entry.clone()));
        }
    }

    let mut pairs = Best::default();
    if search.include_pairs {
        for m in pair_family(&sequence, search.second_index)? {
            if let Some((b, end)) = busemann_of(&m.map) {
                let err = (b - t).abs();
                pairs = pairs.offer(
                    err,
                    || TimeEntry {
                        t,
                        witness: m.label(),
                        family: m.family,
                        endpoint_size: end,
                        busemann_value: b,
                        busemann_error: err,
                    },
                    end > threshold,
                );
            }
        }
    }
    let all = words.merge(pairs);
    match all.admissible {
        Some((err, entry)) if err < tol => Ok(TimeDetection::Found(entry)),
        _ => Ok(TimeDetection::NotFound {
            t,
            closest: all.closest.map(|(_, e)| e),
        }),
    }
}

/// Times `t_{n+2} = t_{n+1} + t_n` from `t_0 = 2 ln δ`, `t_1 = 2 ln(δ(δ+1))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FibonacciTimes {
    pub delta: f64,
    pub t0: f64,
    pub t1: f64,
    pub entries: Vec<f64>,
    /// `A = (t_1 − ψ t_0)/√5`
    pub fitted_a: f64,
    /// `B = (φ t_0 − t_1)/√5`
    pub fitted_b: f64,
    /// `ln δ + 2 ln(δ(δ+1))/√5`
    pub alpha: f64,
    /// `ln δ − 2 ln(δ(δ+1))/√5`
    pub beta: f64,
}

pub const PHI: f64 = 1.618_033_988_749_895;
pub const PSI: f64 = -0.618_033_988_749_894_9;
const SQRT_5: f64 = 2.236_067_977_499_79;

impl FibonacciTimes {
    /// `A φⁿ + B ψⁿ`
    pub fn closed_form(&self, n: usize) -> f64 {
        self.fitted_a * PHI.powi(n as i32) + self.fitted_b * PSI.powi(n as i32)
    }

    /// `α φⁿ + β ψⁿ`, which matches `t_0` but not `t_1`.
    pub fn alpha_beta_closed_form(&self, n: usize) -> f64 {
        self.alpha * PHI.powi(n as i32) + self.beta * PSI.powi(n as i32)
    }

    /// `α φ + β ψ − t_1`; equals `ln δ`.
    pub fn discrepancy_at_one(&self) -> f64 {
        self.alpha_beta_closed_form(1) - self.t1
    }

    /// `|t_n − A φⁿ − B ψⁿ| / t_n`
    pub fn relative_residual(&self, n: usize) -> f64 {
        (self.entries[n] - self.closed_form(n)).abs() / self.entries[n].abs()
    }
}

/// The first `count ≥ 2` Fibonacci times for `δ`.
pub fn fibonacci_times(delta: &SurfaceParameter, count: usize) -> Result<FibonacciTimes> {
    if count < 2 {
        return Err(Error::InvalidParameter("Fibonacci times need count ≥ 2".into()));
    }
    let d = delta.value();
    let t0 = 2.0 * d.ln();
    let t1 = 2.0 * (d * (d + 1.0)).ln();
    let mut entries = vec![t0, t1];
    while entries.len() < count {
        let n = entries.len();
        entries.push(entries[n - 1] + entries[n - 2]);
    }
    Ok(FibonacciTimes {
        delta: d,
        t0,
        t1,
        entries,
        fitted_a: (t1 - PSI * t0) / SQRT_5,
        fitted_b: (PHI * t0 - t1) / SQRT_5,
        alpha: d.ln() + t1 / SQRT_5,
        beta: d.ln() - t1 / SQRT_5,
    })
}
