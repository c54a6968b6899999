//! The δ-family of Schottky generators.
//!
//! For `δ > 1` and `n ≥ 1` the generator `h_n(z) = (a_n z + b_n)/(c_n z + d_n)`
//! has
//!
//! ```text
//! a_n = δ + 2n/(n²+1),  b_n = n + (n²+1)δ,  c_n = 1/n,  d_n = (n²+1)/n.
//! ```
//!
//! Its isometry circle `S_{−n}` (`|c_n z + d_n| = 1`) has centre
//! `Y_n = −(n²+1)` and radius `n`; the isometry circle `S_n` of `h_n⁻¹` has
//! centre `X_n = n·a_n` and the same radius. Consecutive raw indices give
//! overlapping half-disks, so the group uses the sparse index sequence
//! `p_1 = 1 + ⌊(δ−1)/2⌋`, `p_{k+1} = 1 + ⌊(δ+1)p_k/(δ−1)⌋`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hyperbolic::{BoundaryPoint, Geodesic, MoebiusMap, UpperHalfPoint};
use crate::precision::{ExtMoebius, ExtReal, Precision};
use crate::report::{Certificate, CheckRecord};
use crate::tolerances;

/// Longest decimal mantissa kept exactly when parsing a parameter.
const MAX_EXACT_DIGITS: usize = 18;

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// The surface parameter `δ > 1`.
///
/// Besides its binary64 value the parameter keeps `δ` as an exact reduced
/// fraction, so the floors in the index recurrence are computed exactly.
/// Parsing from decimal text keeps the decimal value (`"1.01"` is `101/100`);
/// building from an `f64` keeps that float's exact dyadic value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceParameter {
    value: f64,
    num: u128,
    den: u128,
}

impl SurfaceParameter {
    pub fn new(delta: f64) -> Result<Self> {
        if !delta.is_finite() || delta <= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "surface parameter δ = {delta} must satisfy δ > 1"
            )));
        }
        // δ = m·2^e exactly
        let bits = delta.to_bits();
        let exp_bits = ((bits >> 52) & 0x7ff) as i32;
        let mantissa = (bits & ((1u64 << 52) - 1)) | (1u64 << 52);
        let e = exp_bits - 1075;
        let (num, den) = if e >= 0 {
            let num = (mantissa as u128)
                .checked_shl(e as u32)
                .filter(|n| *n < (1u128 << 62))
                .ok_or_else(|| {
                    Error::InvalidParameter(format!("surface parameter δ = {delta} is too large"))
                })?;
            (num, 1)
        } else {
            (mantissa as u128, 1u128 << (-e) as u32)
        };
        Ok(Self::reduced(delta, num, den))
    }

    fn reduced(value: f64, num: u128, den: u128) -> Self {
        let g = gcd(num, den);
        Self {
            value,
            num: num / g,
            den: den / g,
        }
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.value
    }

    /// `δ` as a reduced fraction `(numerator, denominator)`.
    pub fn ratio(&self) -> (u128, u128) {
        (self.num, self.den)
    }

    /// `p_1 = 1 + ⌊(δ−1)/2⌋`
    pub fn first_index(&self) -> u64 {
        1 + ((self.num - self.den) / (2 * self.den)) as u64
    }

    /// `1 + ⌊(δ+1)p/(δ−1)⌋`, or `None` on overflow of `u64`.
    pub fn next_index(&self, p: u64) -> Option<u64> {
        let up = (self.num + self.den).checked_mul(p as u128)?;
        let q = up / (self.num - self.den);
        u64::try_from(q).ok()?.checked_add(1)
    }

    /// `(δ−1)q − (δ+1)p`, evaluated exactly and then rounded.
    pub fn recurrence_gap(&self, p: u64, q: u64) -> f64 {
        let lhs = (self.num - self.den).checked_mul(q as u128);
        let rhs = (self.num + self.den).checked_mul(p as u128);
        match (lhs, rhs) {
            (Some(l), Some(r)) if l >= r => ((l - r) as f64) / self.den as f64,
            (Some(l), Some(r)) => -(((r - l) as f64) / self.den as f64),
            _ => (self.value - 1.0) * q as f64 - (self.value + 1.0) * p as f64,
        }
    }
}

impl FromStr for SurfaceParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let value: f64 = s
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("cannot parse δ from {s:?}")))?;
        let base = Self::new(value)?;
        let (mantissa, exponent) = match s.find(['e', 'E']) {
            Some(i) => match s[i + 1..].parse::<i32>() {
                Ok(e) => (&s[..i], e),
                Err(_) => return Ok(base),
            },
            None => (s, 0),
        };
        let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
        let digits: String = format!("{int_part}{frac_part}");
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Ok(base);
        }
        let digits = digits.trim_start_matches('0');
        if digits.len() > MAX_EXACT_DIGITS {
            return Ok(base);
        }
        let m: u128 = if digits.is_empty() { 0 } else { digits.parse().expect("digits") };
        let shift = exponent - frac_part.len() as i32;
        let exact = if shift >= 0 {
            10u128
                .checked_pow(shift as u32)
                .and_then(|p| m.checked_mul(p))
                .map(|n| (n, 1u128))
        } else {
            10u128.checked_pow((-shift) as u32).map(|d| (m, d))
        };
        match exact {
            Some((num, den)) if num > den && num + den < (1u128 << 64) => {
                Ok(Self::reduced(value, num, den))
            }
            _ => Ok(base),
        }
    }
}

impl fmt::Display for SurfaceParameter {
    /// Exact decimal expansion when it is short, otherwise the shortest
    /// round-tripping binary64 representation.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (mut twos, mut fives, mut rest) = (0u32, 0u32, self.den);
        while rest % 2 == 0 {
            rest /= 2;
            twos += 1;
        }
        while rest % 5 == 0 {
            rest /= 5;
            fives += 1;
        }
        let places = twos.max(fives);
        if rest == 1 && places as usize <= MAX_EXACT_DIGITS {
            let scale = 10u128.pow(places);
            if let Some(scaled) = self.num.checked_mul(scale / self.den) {
                let int = scaled / scale;
                let frac = scaled % scale;
                return if places == 0 {
                    write!(f, "{int}")
                } else {
                    let frac = format!("{frac:0width$}", width = places as usize);
                    write!(f, "{int}.{}", frac.trim_end_matches('0'))
                };
            }
        }
        write!(f, "{}", self.value)
    }
}

impl Serialize for SurfaceParameter {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.value)
    }
}

impl<'de> Deserialize<'de> for SurfaceParameter {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        SurfaceParameter::new(v).map_err(serde::de::Error::custom)
    }
}

/// Coefficients of the generator `h_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneratorCoefficients {
    pub n: u64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl GeneratorCoefficients {
    /// The map `h_n`; coefficients are used as rounded, not rescaled.
    pub fn to_map(&self) -> MoebiusMap {
        MoebiusMap::from_unit_coefficients(self.a, self.b, self.c, self.d)
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn det(&self) -> f64 {
        crate::hyperbolic::det2(self.a, self.b, self.c, self.d)
    }
}

/// The generator `h_n` of the δ-family.
pub fn make_generator(n: u64, delta: &SurfaceParameter) -> Result<GeneratorCoefficients> {
    if n == 0 {
        return Err(Error::InvalidParameter("generator index must be ≥ 1".into()));
    }
    let d = delta.value();
    let nf = n as f64;
    let n2p1 = nf * nf + 1.0;
    Ok(GeneratorCoefficients {
        n,
        a: d + 2.0 * nf / n2p1,
        b: nf + n2p1 * d,
        c: 1.0 / nf,
        d: n2p1 / nf,
    })
}

/// The first terms `p_1 < p_2 < …` of the index recurrence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexSequence {
    delta: SurfaceParameter,
    entries: Vec<u64>,
}

impl IndexSequence {
    pub fn delta(&self) -> &SurfaceParameter {
        &self.delta
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `p_k` for a 1-based position `k`.
    pub fn get(&self, position: usize) -> Option<u64> {
        position.checked_sub(1).and_then(|i| self.entries.get(i).copied())
    }

    pub fn last(&self) -> u64 {
        *self.entries.last().expect("index sequences are non-empty")
    }

    /// The first `count` entries.
    pub fn truncated(&self, count: usize) -> IndexSequence {
        IndexSequence {
            delta: self.delta,
            entries: self.entries[..count.min(self.entries.len())].to_vec(),
        }
    }

    pub fn contains(&self, n: u64) -> bool {
        self.entries.binary_search(&n).is_ok()
    }
}

/// `count` terms of the index recurrence for `δ`.
pub fn index_sequence(delta: &SurfaceParameter, count: usize) -> Result<IndexSequence> {
    if count == 0 {
        return Err(Error::InvalidParameter("index sequence needs count ≥ 1".into()));
    }
    let mut entries = Vec::with_capacity(count);
    entries.push(delta.first_index());
    while entries.len() < count {
        let p = *entries.last().expect("non-empty");
        let next = delta.next_index(p).ok_or_else(|| {
            Error::CapacityExceeded(format!(
                "index p_{} overflows u64 for δ = {delta} (p_{} = {p}, growth ratio ≈ {:.1})",
                entries.len() + 1,
                entries.len(),
                (delta.value() + 1.0) / (delta.value() - 1.0)
            ))
        })?;
        entries.push(next);
    }
    Ok(IndexSequence {
        delta: *delta,
        entries,
    })
}

/// Which of the paired circles: `S_n` (centre `X_n`, positive side) or
/// `S_{−n}` (centre `Y_n`, negative side).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Positive,
    Negative,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Positive => "positive",
            Side::Negative => "negative",
        })
    }
}

/// The pair of isometry circles `S_{±n}` of one generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsometryCircle {
    pub index: u64,
    /// `X_n = n·a_n = 2n²/(n²+1) + nδ`
    pub center_pos: f64,
    /// `Y_n = −n·d_n = −(n²+1)`
    pub center_neg: f64,
    /// `R_n = 1/c_n = n`
    pub radius: f64,
}

impl IsometryCircle {
    pub fn new(index: u64, delta: &SurfaceParameter) -> Result<Self> {
        if index == 0 {
            return Err(Error::InvalidParameter("circle index must be ≥ 1".into()));
        }
        let n = index as f64;
        let n2p1 = n * n + 1.0;
        Ok(Self {
            index,
            center_pos: 2.0 - 2.0 / n2p1 + n * delta.value(),
            center_neg: -n2p1,
            radius: n,
        })
    }

    /// `α_n = X_n − R_n`
    pub fn alpha(&self) -> f64 {
        self.center_pos - self.radius
    }

    /// `β_n = X_n + R_n`
    pub fn beta(&self) -> f64 {
        self.center_pos + self.radius
    }

    /// `u_n = Y_n + R_n`
    pub fn u(&self) -> f64 {
        self.center_neg + self.radius
    }

    /// `v_n = Y_n − R_n`
    pub fn v(&self) -> f64 {
        self.center_neg - self.radius
    }

    pub fn center(&self, side: Side) -> f64 {
        match side {
            Side::Positive => self.center_pos,
            Side::Negative => self.center_neg,
        }
    }

    pub fn geodesic(&self, side: Side) -> Geodesic {
        let m = self.center(side);
        Geodesic::semicircle(m - self.radius, m + self.radius).expect("positive radius")
    }

    /// Point of the circle at angle `θ ∈ (0, π)`.
    pub fn point(&self, side: Side, theta: f64) -> UpperHalfPoint {
        UpperHalfPoint::new_unchecked(
            self.center(side) + self.radius * theta.cos(),
            self.radius * theta.sin(),
        )
    }

    /// Membership in the open half-disk `D_{±n}`.
    pub fn disk_contains(&self, side: Side, z: UpperHalfPoint) -> bool {
        self.relative_position(side, z) < 1.0
    }

    /// `|z − centre| / R`: below 1 inside the half-disk, above 1 outside.
    pub fn relative_position(&self, side: Side, z: UpperHalfPoint) -> f64 {
        (z.x() - self.center(side)).hypot(z.y()) / self.radius
    }
}

/// Isometry circles for a finite list of indices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsometryCircleSystem {
    delta: SurfaceParameter,
    circles: Vec<IsometryCircle>,
}

impl IsometryCircleSystem {
    /// Circles for arbitrary increasing indices, e.g. raw consecutive integers.
    pub fn from_indices(delta: &SurfaceParameter, indices: &[u64]) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "circle indices must be strictly increasing".into(),
            ));
        }
        let circles = indices
            .iter()
            .map(|&n| IsometryCircle::new(n, delta))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            delta: *delta,
            circles,
        })
    }

    pub fn delta(&self) -> &SurfaceParameter {
        &self.delta
    }

    pub fn circles(&self) -> &[IsometryCircle] {
        &self.circles
    }

    /// Number of generators represented: the truncation depth.
    pub fn depth(&self) -> usize {
        self.circles.len()
    }

    /// The open half-disk containing `z`, if any.
    pub fn containing_disk(&self, z: UpperHalfPoint) -> Option<(Side, u64)> {
        self.circles.iter().find_map(|c| {
            [Side::Positive, Side::Negative]
                .into_iter()
                .find(|&s| c.disk_contains(s, z))
                .map(|s| (s, c.index))
        })
    }
}

/// Circles `S_{±p_k}` for every entry of the index sequence.
pub fn circle_system(indices: &IndexSequence) -> IsometryCircleSystem {
    IsometryCircleSystem::from_indices(indices.delta(), indices.entries())
        .expect("index sequences are strictly increasing and positive")
}

/// Whether `z` lies in the truncated fundamental domain: outside every open
/// half-disk `D_{±p_k}` of the system.
pub fn in_fundamental_domain(z: UpperHalfPoint, sys: &IsometryCircleSystem) -> bool {
    sys.containing_disk(z).is_none()
}

/// `X_q − X_p − R_q − R_p` as
/// `2/(p²+1) − 2/(q²+1) + (δ−1)q − (δ+1)p`, free of the cancellation between
/// the large centres.
fn positive_gap_margin(delta: &SurfaceParameter, p: u64, q: u64) -> f64 {
    let (pf, qf) = (p as f64, q as f64);
    let small = 2.0 / (pf * pf + 1.0) - 2.0 / (qf * qf + 1.0);
    delta.recurrence_gap(p, q) + small
}

/// `Y_p − Y_q − R_p − R_q = q² − p² − p − q`, exact while it fits in `i128`.
fn negative_gap_margin(p: u64, q: u64) -> f64 {
    let (p, q) = (p as i128, q as i128);
    match (q.checked_mul(q), p.checked_mul(p)) {
        (Some(q2), Some(p2)) => (q2 - p2 - p - q) as f64,
        _ => {
            let (p, q) = (p as f64, q as f64);
            (q - p) * (q + p) - p - q
        }
    }
}

/// Checks that the half-disks of the system are pairwise disjoint.
///
/// For every pair `p < q` of indices:
/// `X_q − X_p > R_q + R_p` (positive side) and `Y_p − Y_q > R_p + R_q`
/// (negative side); and for every index `X_n − R_n > 0 > Y_n + R_n`.
/// Consecutive pairs are named `*-consecutive`, the rest `*-pairwise`.
pub fn verify_disjointness(sys: &IsometryCircleSystem) -> Certificate {
    let start = Instant::now();
    let delta = sys.delta();
    let mut cert = Certificate::new("disjoint", delta.value());
    cert.truncate_at("indices", sys.depth() as u64);
    for c in sys.circles() {
        cert.push(CheckRecord::exceeds("positive-disk-right-of-zero", c.alpha(), 0.0).with_pair(c.index, c.index));
        cert.push(CheckRecord::below("negative-disk-left-of-zero", c.u(), 0.0).with_pair(c.index, c.index));
    }
    let circles = sys.circles();
    for (i, lo) in circles.iter().enumerate() {
        for (j, hi) in circles.iter().enumerate().skip(i + 1) {
            let kind = if j == i + 1 { "consecutive" } else { "pairwise" };
            let (p, q) = (lo.index, hi.index);
            cert.push(
                CheckRecord::exceeds(
                    format!("positive-{kind}"),
                    hi.center_pos - lo.center_pos,
                    hi.radius + lo.radius,
                )
                .with_margin(positive_gap_margin(delta, p, q), true)
                .with_pair(p, q),
            );
            cert.push(
                CheckRecord::exceeds(
                    format!("negative-{kind}"),
                    lo.center_neg - hi.center_neg,
                    lo.radius + hi.radius,
                )
                .with_margin(negative_gap_margin(p, q), true)
                .with_pair(p, q),
            );
        }
    }
    cert.timing_ms = start.elapsed().as_secs_f64() * 1e3;
    cert
}

/// Endpoint pairing of `h_n` on its isometry circle, found numerically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EndpointPairing {
    /// `h_n(u_n) = α_n` and `h_n(v_n) = β_n`
    UToAlpha,
    /// `h_n(u_n) = β_n` and `h_n(v_n) = α_n`
    UToBeta,
}

/// Checks the ping-pong pairing of `h_n`: `S_{−n}` is carried onto `S_n`
/// and the exterior of `S_{−n}` into the open half-disk `D_n`.
///
/// `samples` points on `S_{−n}` are mapped and their Euclidean distance to
/// `S_n` compared against 1e−9; exterior samples (including `i`) must land
/// strictly inside `D_n`. The observed endpoint pairing is recorded as a note.
pub fn verify_pingpong(n: u64, delta: &SurfaceParameter, samples: usize) -> Result<Certificate> {
    verify_pingpong_with(n, delta, samples, Precision::Double, tolerances::PINGPONG_ON_CIRCLE)
}

/// Precision adequate for the circle-onto-circle test at index `n`.
///
/// On `S_{−n}` the denominator `c_n z + d_n` has modulus 1 while its terms
/// have size `≈ n`, so binary64 images carry an error of about `ε δ n²`.
pub fn pingpong_precision(n: u64, delta: &SurfaceParameter, tol: f64) -> Precision {
    let estimate = f64::EPSILON * delta.value() * (n as f64).powi(2);
    if estimate < 0.1 * tol {
        Precision::Double
    } else {
        Precision::Extended { bits: 128 }
    }
}

/// `|h_n(z) − X_n| − R_n` for `z = Y_n + R_n e^{iθ}`, in the given precision.
fn circle_deviation(
    h: &MoebiusMap,
    ext: Option<&ExtMoebius>,
    circle: &IsometryCircle,
    theta: f64,
) -> f64 {
    let (cos, sin) = (theta.cos(), theta.sin());
    match ext {
        None => {
            let w = h.apply(circle.point(Side::Negative, theta));
            ((w.x() - circle.center_pos).hypot(w.y()) - circle.radius).abs()
        }
        Some(m) => {
            let bits = m.coefficients()[0].bits();
            let r = ExtReal::from_f64(circle.radius, bits);
            let x = &ExtReal::from_f64(circle.center_neg, bits) + &(&r * &ExtReal::from_f64(cos, bits));
            let y = &r * &ExtReal::from_f64(sin, bits);
            let (u, v) = m.apply(&x, &y);
            let [a, _, c, _] = m.coefficients();
            // X_n = a_n/c_n
            let center = a / c;
            let du = &u - &center;
            let sq = &(&du * &du) + &(&v * &v);
            let excess = (&sq - &(&r * &r)).to_f64();
            (excess / (sq.to_f64().sqrt() + circle.radius)).abs()
        }
    }
}

/// [`verify_pingpong`] with the circle images evaluated in `precision` and
/// compared against `tol`.
pub fn verify_pingpong_with(
    n: u64,
    delta: &SurfaceParameter,
    samples: usize,
    precision: Precision,
    tol: f64,
) -> Result<Certificate> {
    if samples == 0 {
        return Err(Error::InvalidParameter("ping-pong check needs samples ≥ 1".into()));
    }
    let start = Instant::now();
    let h = make_generator(n, delta)?.to_map();
    let circle = IsometryCircle::new(n, delta)?;
    let mut cert = Certificate::new("pingpong", delta.value());
    cert.truncate_at("samples", samples as u64);

    let ext = match precision {
        Precision::Double => None,
        Precision::Extended { bits } => Some(ExtMoebius::generator(n, delta.value(), bits)?),
    };
    cert.truncate_at("mantissa_bits", precision.mantissa_bits() as u64);
    let thetas = (0..samples).map(|k| PI * (k as f64 + 0.5) / samples as f64);
    let mut worst = 0.0_f64;
    for theta in thetas {
        let dev = circle_deviation(&h, ext.as_ref(), &circle, theta);
        worst = worst.max(dev);
        if dev > tol {
            cert.push(
                CheckRecord::at_most(format!("circle-onto-circle theta={theta}"), dev, tol)
                    .with_pair(n, n),
            );
        }
    }
    cert.push(
        CheckRecord::at_most("circle-onto-circle max deviation", worst, tol)
            .with_pair(n, n),
    );

    // exterior of S_{−n} goes inside S_n
    let mut outside = Vec::new();
    for rho in [1.0 + 1e-6, 1.01, 1.5, 3.0, 10.0, 1e3] {
        for k in 0..8 {
            let theta = PI * (k as f64 + 0.5) / 8.0;
            let z = circle.point(Side::Negative, theta);
            let z = UpperHalfPoint::new_unchecked(
                circle.center_neg + rho * (z.x() - circle.center_neg),
                rho * z.y(),
            );
            outside.push(z);
        }
    }
    outside.push(UpperHalfPoint::I);
    let worst_inside = outside
        .iter()
        .map(|&z| circle.relative_position(Side::Positive, h.apply(z)))
        .fold(0.0_f64, f64::max);
    cert.push(CheckRecord::below("exterior-into-disk", worst_inside, 1.0).with_pair(n, n));
    cert.push(
        CheckRecord::below(
            "base-point-i-into-disk",
            circle.relative_position(Side::Positive, h.apply(UpperHalfPoint::I)),
            1.0,
        )
        .with_pair(n, n),
    );

    // endpoints go to endpoints; which way round is recorded, not asserted
    let image = |x: f64| match h.apply_boundary(BoundaryPoint::Finite(x)) {
        BoundaryPoint::Finite(y) => y,
        BoundaryPoint::Infinity => f64::INFINITY,
    };
    let (hu, hv) = (image(circle.u()), image(circle.v()));
    let straight = (hu - circle.alpha()).abs().max((hv - circle.beta()).abs());
    let crossed = (hu - circle.beta()).abs().max((hv - circle.alpha()).abs());
    let (err, pairing) = if straight <= crossed {
        (straight, EndpointPairing::UToAlpha)
    } else {
        (crossed, EndpointPairing::UToBeta)
    };
    let tol = tol * circle.beta().max(1.0);
    cert.push(CheckRecord::at_most("endpoints-onto-endpoints", err, tol).with_pair(n, n));
    cert.note(match pairing {
        EndpointPairing::UToAlpha => format!("h_{n}(u_{n}) = alpha_{n}, h_{n}(v_{n}) = beta_{n}"),
        EndpointPairing::UToBeta => format!("h_{n}(u_{n}) = beta_{n}, h_{n}(v_{n}) = alpha_{n}"),
    });
    cert.timing_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(cert)
}

/// Numerically observed endpoint pairing for `h_n`.
pub fn endpoint_pairing(n: u64, delta: &SurfaceParameter) -> Result<EndpointPairing> {
    let h = make_generator(n, delta)?.to_map();
    let c = IsometryCircle::new(n, delta)?;
    let hu = h.apply_boundary(BoundaryPoint::Finite(c.u())).magnitude();
    Ok(if (hu - c.alpha()).abs() <= (hu - c.beta()).abs() {
        EndpointPairing::UToAlpha
    } else {
        EndpointPairing::UToBeta
    })
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;

    fn delta(v: f64) -> SurfaceParameter {
        SurfaceParameter::new(v).unwrap()
    }

    #[test]
    fn parameter_must_exceed_one() {
        assert!(SurfaceParameter::new(1.0).is_err());
        assert!(SurfaceParameter::new(0.5).is_err());
        assert!(SurfaceParameter::new(f64::NAN).is_err());
        assert!("1".parse::<SurfaceParameter>().is_err());
        assert!("abc".parse::<SurfaceParameter>().is_err());
    }

    #[test]
    fn decimal_parameters_are_exact() {
        let d: SurfaceParameter = "1.01".parse().unwrap();
        assert_eq!(d.ratio(), (101, 100));
        assert_eq!(d.to_string(), "1.01");
        let d: SurfaceParameter = "3".parse().unwrap();
        assert_eq!(d.ratio(), (3, 1));
        let d: SurfaceParameter = "25e-1".parse().unwrap();
        assert_eq!(d.ratio(), (5, 2));
        assert_eq!(d.to_string(), "2.5");
        // binary64 1.01 is a different rational
        assert_ne!(delta(1.01).ratio(), (101, 100));
        assert_eq!(delta(1.5).ratio(), (3, 2));
    }

    #[test]
    fn generator_closed_forms() {
        let g = make_generator(2, &delta(3.0)).unwrap();
        assert_relative_eq!(g.a, 3.8, max_relative = 1e-15);
        assert_eq!((g.b, g.c, g.d), (17.0, 0.5, 2.5));
        assert_relative_eq!(g.det(), 1.0, max_relative = 1e-15);
        let g = make_generator(1, &delta(3.0)).unwrap();
        assert_eq!((g.a, g.b, g.c, g.d), (4.0, 7.0, 1.0, 2.0));
        assert_eq!(g.trace(), 6.0);
        assert!(make_generator(0, &delta(3.0)).is_err());
    }

    #[test]
    fn determinant_and_trace_over_a_range() {
        for d in [1.001, 1.5, 2.0, 3.0, 7.25, 100.0] {
            for n in 1..2000 {
                let g = make_generator(n, &delta(d)).unwrap();
                assert!((g.det() - 1.0).abs() < 1e-12 * (1.0 + n as f64 * d), "δ={d} n={n}");
                assert!(g.trace() > 2.0);
            }
        }
    }

    #[test]
    fn index_sequence_for_three() {
        let s = index_sequence(&delta(3.0), 6).unwrap();
        assert_eq!(s.entries(), &[2, 5, 11, 23, 47, 95]);
        assert_eq!(s.get(1), Some(2));
        assert_eq!(s.get(0), None);
        assert!(index_sequence(&delta(3.0), 0).is_err());
    }

    #[test]
    fn first_indices() {
        assert_eq!(delta(5.0).first_index(), 3);
        assert_eq!(delta(1.5).first_index(), 1);
        assert_eq!(delta(10.0).first_index(), 5);
    }

    #[test]
    fn overflow_is_capacity_exceeded() {
        let d: SurfaceParameter = "1.01".parse().unwrap();
        let s = index_sequence(&d, 5).unwrap();
        assert_eq!(&s.entries()[..2], &[1, 202]);
        match index_sequence(&d, 30) {
            Err(Error::CapacityExceeded(_)) => {}
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn circle_for_three_two() {
        let c = IsometryCircle::new(2, &delta(3.0)).unwrap();
        assert_relative_eq!(c.center_pos, 7.6, max_relative = 1e-15);
        assert_eq!((c.center_neg, c.radius), (-5.0, 2.0));
        assert_relative_eq!(c.alpha(), 5.6, max_relative = 1e-15);
        assert_relative_eq!(c.beta(), 9.6, max_relative = 1e-15);
        // u = p − 1 − p², v = −p − 1 − p²
        assert_eq!((c.u(), c.v()), (-3.0, -7.0));
    }

    #[test]
    fn circle_is_the_isometry_circle() {
        let d = delta(3.0);
        for n in [1, 2, 5, 11, 95] {
            let g = make_generator(n, &d).unwrap();
            let c = IsometryCircle::new(n, &d).unwrap();
            for k in 1..50 {
                let z = c.point(Side::Negative, PI * k as f64 / 50.0);
                let modulus = (g.c * z.x() + g.d).hypot(g.c * z.y());
                assert!((modulus - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn disjointness_small_example() {
        let d = delta(3.0);
        let sys = IsometryCircleSystem::from_indices(&d, &[2, 5]).unwrap();
        let cert = verify_disjointness(&sys);
        assert!(cert.passed());
        let pos = cert.checks.iter().find(|c| c.name == "positive-consecutive").unwrap();
        assert_relative_eq!(pos.margin, 50.0 / 26.0 + 15.0 - 7.6 - 7.0, max_relative = 1e-12);
        assert!((pos.margin - 2.323).abs() < 1e-3);
        let neg = cert.checks.iter().find(|c| c.name == "negative-consecutive").unwrap();
        assert_eq!(neg.margin, 14.0);
    }

    #[test]
    fn raw_consecutive_indices_overlap() {
        let d = delta(3.0);
        let sys = IsometryCircleSystem::from_indices(&d, &[20, 21]).unwrap();
        let cert = verify_disjointness(&sys);
        assert!(!cert.passed());
        assert!(cert.failures().any(|c| c.name == "positive-consecutive"));
    }

    #[test]
    fn pingpong_for_three_two() {
        let d = delta(3.0);
        let cert = verify_pingpong(2, &d, 100).unwrap();
        assert!(cert.passed(), "{:#?}", cert.failures().collect::<Vec<_>>());
        // top of S₋₂ lands on S₂
        let h = make_generator(2, &d).unwrap().to_map();
        let w = h.apply(UpperHalfPoint::new(-5.0, 2.0).unwrap());
        assert!(((w.x() - 7.6).hypot(w.y()) - 2.0).abs() < 1e-12);
        assert_eq!(endpoint_pairing(2, &d).unwrap(), EndpointPairing::UToAlpha);
        assert!(verify_pingpong(2, &d, 0).is_err());
    }

    #[test]
    fn large_index_pingpong_needs_extended_precision() {
        let d = delta(3.0);
        let p = 1535;
        assert_eq!(pingpong_precision(2, &d, 1e-9), Precision::Double);
        let ext = pingpong_precision(p, &d, 1e-9);
        assert_ne!(ext, Precision::Double);
        let double = verify_pingpong_with(p, &d, 100, Precision::Double, 1e-9).unwrap();
        let worst = |c: &Certificate| {
            c.checks.iter().find(|r| r.name == "circle-onto-circle max deviation").unwrap().lhs
        };
        assert!(worst(&double) > 1e-11);
        let extended = verify_pingpong_with(p, &d, 100, ext, 1e-9).unwrap();
        assert!(extended.passed());
        assert!(worst(&extended) < 1e-11);
    }

    #[test]
    fn fundamental_domain_membership() {
        let d = delta(3.0);
        let sys = circle_system(&index_sequence(&d, 20).unwrap());
        assert!(in_fundamental_domain(UpperHalfPoint::I, &sys));
        assert!(in_fundamental_domain(UpperHalfPoint::new(0.0, 1e6).unwrap(), &sys));
        let x1 = sys.circles()[0].center_pos;
        let inside = UpperHalfPoint::new(x1, 0.1).unwrap();
        assert!(!in_fundamental_domain(inside, &sys));
        assert_eq!(sys.containing_disk(inside), Some((Side::Positive, 2)));
        assert_eq!(sys.depth(), 20);
    }
}
