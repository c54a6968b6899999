//! Distances from `ie^t` to the isometry circles, and injectivity estimates.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyperbolic::{dist_to_geodesic, distance, UpperHalfPoint};
use crate::schottky::{index_sequence, make_generator, IsometryCircle, Side, SurfaceParameter};
use crate::words::{par_fold_words, Alphabet, WordBudget};

fn on_ray(t: f64) -> UpperHalfPoint {
    UpperHalfPoint::on_imaginary_axis(t.exp()).expect("e^t > 0")
}

/// `d(ie^t, S_{−p}) = asinh((e^t + (p⁴+p²+1)e^{−t})/(2p))`.
pub fn pcl_distance_neg(t: f64, p: u64) -> f64 {
    ft_value(t, p as f64).asinh()
}

/// `asinh(e^{t/2}/2)`, the lower bound for the negative side.
pub fn pcl_bound_neg(t: f64) -> f64 {
    ((0.5 * t).exp() / 2.0).asinh()
}

/// `asinh(e^t)`, the bound tested on the positive side; it fails for large `t`.
pub fn pcl_bound_pos(t: f64) -> f64 {
    t.exp().asinh()
}

/// `d(ie^t, S_p)`, computed as `d(h_p⁻¹(ie^t), S_{−p})`.
pub fn pcl_distance_pos(t: f64, p: u64, delta: &SurfaceParameter) -> Result<f64> {
    let h = make_generator(p, delta)?.to_map();
    let circle = IsometryCircle::new(p, delta)?;
    let pulled = h.inverse().apply(on_ray(t));
    Ok(dist_to_geodesic(pulled, &circle.geodesic(Side::Negative)))
}

/// `d(ie^t, S_p) = asinh(e^t/(2p) + p(a_p² − 1)/(2e^t))`.
///
/// At `x = 0` the semicircle formula reduces to `(e^{2t} + α_p β_p)/(2p e^t)`
/// and `α_p β_p = X_p² − p² = p²(a_p² − 1)`.
pub fn pcl_distance_pos_closed(t: f64, p: u64, delta: &SurfaceParameter) -> Result<f64> {
    let a = make_generator(p, delta)?.a;
    let pf = p as f64;
    Ok((0.5 * (t.exp() / pf + pf * (a * a - 1.0) * (-t).exp())).asinh())
}

/// The same quantity with the `−(u+v)x` term of the semicircle formula
/// dropped, as a diagnostic; it is not a distance.
pub fn pcl_pos_uncorrected_argument(t: f64, p: u64, delta: &SurfaceParameter) -> Result<f64> {
    let g = make_generator(p, delta)?;
    let pf = p as f64;
    let e2 = (2.0 * t).exp();
    let q = pf.powi(4) + pf * pf + 1.0;
    Ok((e2 * g.d * g.d + g.b * g.b + q * (e2 * g.c * g.c + g.a * g.a)) / (2.0 * pf * t.exp()))
}

/// `f_t(x) = (e^t + (x⁴+x²+1)e^{−t})/(2x)`.
pub fn ft_value(t: f64, x: f64) -> f64 {
    let x2 = x * x;
    (t.exp() + (x2 * x2 + x2 + 1.0) * (-t).exp()) / (2.0 * x)
}

/// Minimum of `f_t` over `[1, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FtMinimum {
    pub t: f64,
    /// Positive root of `3x⁴ + x² − 1 − e^{2t} = 0`.
    pub x_t: f64,
    /// `3x_t⁴ + x_t² − 1 − e^{2t}`
    pub residual: f64,
    /// `f_t(x_t)`
    pub f_at_x_t: f64,
    /// `max(x_t, 1)`: the minimizer on `[1, ∞)`.
    pub x_min: f64,
    pub f_min: f64,
    /// `e^{t/2}/2`
    pub bound: f64,
}

impl FtMinimum {
    /// Whether the unconstrained critical point lies below 1.
    pub fn clamped(&self) -> bool {
        self.x_t < 1.0
    }
}

/// `x_t = √((−1 + √(13 + 12e^{2t}))/6)` and the constrained minimum of `f_t`.
pub fn ft_minimizer(t: f64) -> FtMinimum {
    let e2 = (2.0 * t).exp();
    let x_t = ((-1.0 + (13.0 + 12.0 * e2).sqrt()) / 6.0).sqrt();
    let x2 = x_t * x_t;
    let x_min = x_t.max(1.0);
    FtMinimum {
        t,
        x_t,
        residual: 3.0 * x2 * x2 + x2 - 1.0 - e2,
        f_at_x_t: ft_value(t, x_t),
        x_min,
        f_min: ft_value(t, x_min),
        bound: (0.5 * t).exp() / 2.0,
    }
}

/// Closed-form lower bound and word-scan estimate of `Inj` at `ie^t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FinenessEstimate {
    pub t: f64,
    /// `asinh(e^{t/2}/2)`
    pub lower_bound: f64,
    /// `min d(ie^t, γ(ie^t))` over the enumerated nonidentity words.
    pub empirical: f64,
    pub witness: String,
    pub alphabet_size: usize,
    pub max_length: usize,
}

/// Scans every reduced word of length `≤ max_length` over the first
/// `alphabet_size` generators for the smallest displacement of `ie^t`.
pub fn injectivity_estimate(
    t: f64,
    delta: &SurfaceParameter,
    alphabet_size: usize,
    max_length: usize,
    budget: &WordBudget,
) -> Result<FinenessEstimate> {
    if alphabet_size == 0 || max_length == 0 {
        return Err(Error::InvalidParameter(
            "injectivity estimate needs positive budgets".into(),
        ));
    }
    let alphabet = Alphabet::new(&index_sequence(delta, alphabet_size)?, alphabet_size)?;
    let z = on_ray(t);
    let (empirical, witness) = par_fold_words(
        &alphabet,
        max_length,
        budget,
        (f64::INFINITY, None),
        |acc, w| {
            let d = distance(z, w.matrix().apply(z));
            if d < acc.0 {
                (d, Some(w.clone()))
            } else {
                acc
            }
        },
        |x, y| if y.0 < x.0 { y } else { x },
    )?;
    Ok(FinenessEstimate {
        t,
        lower_bound: pcl_bound_neg(t),
        empirical,
        witness: witness.map_or_else(String::new, |w| alphabet.render(&w)),
        alphabet_size,
        max_length,
    })
}

/// [`injectivity_estimate`] over an ascending grid of times.
pub fn fineness_scan(
    t_grid: &[f64],
    delta: &SurfaceParameter,
    alphabet_size: usize,
    max_length: usize,
    budget: &WordBudget,
) -> Result<Vec<FinenessEstimate>> {
    if t_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter("time grid must be sorted ascending".into()));
    }
    t_grid
        .iter()
        .map(|&t| injectivity_estimate(t, delta, alphabet_size, max_length, budget))
        .collect()
}
