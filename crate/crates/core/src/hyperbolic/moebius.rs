use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use super::{BoundaryPoint, UpperHalfPoint};
use crate::error::{Error, Result};

/// `ad − bc` with one rounding, via Kahan's fused-multiply-add trick.
///
/// Large generators have `ad` and `bc` of size `~n·δ` that cancel down to 1,
/// so the naive product difference loses most of its digits.
#[inline]
pub(crate) fn det2(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let w = b * c;
    let err = (-b).mul_add(c, w);
    let f = a.mul_add(d, -w);
    f + err
}

/// An orientation-preserving isometry `z ↦ (az + b)/(cz + d)` of the upper
/// half-plane, stored as a unit-determinant real matrix.
///
/// The matrix is a projective representative: `±M` act identically, and the
/// stored sign is chosen so that the trace is non-negative (or, for trace
/// zero, so that `c > 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoebiusMap {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl MoebiusMap {
    pub const IDENTITY: Self = Self {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    /// Builds a map from any real matrix with positive determinant,
    /// rescaling it to determinant one.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if ![a, b, c, d].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite Möbius coefficients ({a}, {b}, {c}, {d})"
            )));
        }
        let det = det2(a, b, c, d);
        if !(det > 0.0) || !det.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Möbius coefficients ({a}, {b}, {c}, {d}) have determinant {det}, need > 0"
            )));
        }
        Ok(Self { a, b, c, d }.rescaled(det))
    }

    /// Takes coefficients known to have unit determinant in exact
    /// arithmetic, keeping them as rounded instead of rescaling by a
    /// determinant that cancels catastrophically for large entries.
    pub(crate) fn from_unit_coefficients(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }.sign_normalized()
    }

    /// `z ↦ z + s`
    pub fn translation(s: f64) -> Self {
        Self {
            a: 1.0,
            b: s,
            c: 0.0,
            d: 1.0,
        }
    }

    /// `z ↦ λz` for `λ > 0`.
    pub fn dilation(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "dilation factor {lambda} must be positive"
            )));
        }
        let s = lambda.sqrt();
        Ok(Self {
            a: s,
            b: 0.0,
            c: 0.0,
            d: 1.0 / s,
        })
    }

    fn rescaled(self, det: f64) -> Self {
        let s = 1.0 / det.sqrt();
        Self {
            a: self.a * s,
            b: self.b * s,
            c: self.c * s,
            d: self.d * s,
        }
        .sign_normalized()
    }

    fn sign_normalized(self) -> Self {
        let trace = self.a + self.d;
        let flip = if trace != 0.0 { trace < 0.0 } else { self.c < 0.0 };
        if flip {
            Self {
                a: -self.a,
                b: -self.b,
                c: -self.c,
                d: -self.d,
            }
        } else {
            self
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn d(&self) -> f64 {
        self.d
    }

    /// `[a, b, c, d]`
    pub fn coefficients(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> f64 {
        det2(self.a, self.b, self.c, self.d)
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    /// `(az + b)/(cz + d)`. `Im` of the image is `Im z / |cz + d|²`.
    pub fn apply(&self, z: UpperHalfPoint) -> UpperHalfPoint {
        let (x, y) = (z.x(), z.y());
        let re_den = self.c * x + self.d;
        let im_den = self.c * y;
        let den = re_den * re_den + im_den * im_den;
        let re_num = self.a * x + self.b;
        let im_num = self.a * y;
        let re = (re_num * re_den + im_num * im_den) / den;
        UpperHalfPoint::new_unchecked(re, y / den)
    }

    /// Action on `ℝ ∪ {∞}`; the pole `−d/c` goes to `∞` and `∞` goes to `a/c`.
    pub fn apply_boundary(&self, xi: BoundaryPoint) -> BoundaryPoint {
        match xi {
            BoundaryPoint::Infinity => {
                if self.c == 0.0 {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite(self.a / self.c)
                }
            }
            BoundaryPoint::Finite(x) => {
                let den = self.c * x + self.d;
                if den == 0.0 {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite((self.a * x + self.b) / den)
                }
            }
        }
    }

    /// `self ∘ other`.
    ///
    /// The raw product is kept: rescaling by its computed determinant would
    /// inject that determinant's cancellation error, of order `ε·|entries|²`,
    /// into every coefficient.
    pub fn compose(&self, other: &Self) -> Self {
        let (u, v) = (self, other);
        Self {
            a: u.a * v.a + u.b * v.c,
            b: u.a * v.b + u.b * v.d,
            c: u.c * v.a + u.d * v.c,
            d: u.c * v.b + u.d * v.d,
        }
        .sign_normalized()
    }

    /// Adjugate `(d, −b, −c, a)`.
    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
        .sign_normalized()
    }

    /// `|m'(z)| = 1/|cz + d|²`; equals `Im m(z) / Im z`.
    pub fn derivative_modulus(&self, z: UpperHalfPoint) -> f64 {
        let re = self.c * z.x() + self.d;
        let im = self.c * z.y();
        1.0 / (re * re + im * im)
    }

    /// Projective equality up to an absolute tolerance on the coefficients.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let same = self
            .coefficients()
            .iter()
            .zip(other.coefficients())
            .all(|(p, q)| (p - q).abs() <= tol);
        let opposite = self
            .coefficients()
            .iter()
            .zip(other.coefficients())
            .all(|(p, q)| (p + q).abs() <= tol);
        same || opposite
    }

    /// Largest coefficient modulus, the natural scale for comparisons.
    pub fn scale(&self) -> f64 {
        self.coefficients()
            .iter()
            .fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }
}

impl Default for MoebiusMap {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Mul for MoebiusMap {
    type Output = MoebiusMap;

    fn mul(self, rhs: Self) -> Self::Output {
        self.compose(&rhs)
    }
}

impl fmt::Display for MoebiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}
