//! Extended-precision backend.
//!
//! Binary64 is the default everywhere. Generator coefficients grow like
//! `δn²`, so for indices beyond about 10⁶ the determinant of a single
//! generator can no longer be resolved to 1e−12 in binary64; the types here
//! redo the matrix arithmetic with a configurable mantissa width.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::MoebiusMap;

const RM: RoundingMode = RoundingMode::ToEven;

/// Smallest accepted mantissa width for the extended backend.
pub const MIN_EXTENDED_BITS: usize = 64;
/// Largest accepted mantissa width.
pub const MAX_EXTENDED_BITS: usize = 1 << 16;

/// Numeric backend selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Precision {
    #[default]
    Double,
    Extended { bits: usize },
}

impl Precision {
    pub fn extended(bits: usize) -> Result<Self> {
        if !(MIN_EXTENDED_BITS..=MAX_EXTENDED_BITS).contains(&bits) {
            return Err(Error::InvalidParameter(format!(
                "extended precision must use {MIN_EXTENDED_BITS}..={MAX_EXTENDED_BITS} mantissa bits, got {bits}"
            )));
        }
        Ok(Precision::Extended { bits })
    }

    /// `None` selects binary64.
    pub fn from_bits(bits: Option<usize>) -> Result<Self> {
        bits.map_or(Ok(Precision::Double), Self::extended)
    }

    pub fn mantissa_bits(&self) -> usize {
        match *self {
            Precision::Double => 53,
            Precision::Extended { bits } => bits,
        }
    }
}

/// A real number with a fixed binary mantissa width.
#[derive(Clone)]
pub struct ExtReal {
    value: BigFloat,
    bits: usize,
}

impl ExtReal {
    pub fn from_f64(x: f64, bits: usize) -> Self {
        Self {
            value: BigFloat::from_f64(x, bits),
            bits,
        }
    }

    pub fn from_u64(n: u64, bits: usize) -> Self {
        Self {
            value: BigFloat::from_u64(n, bits),
            bits,
        }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    /// Nearest binary64 value (through the decimal expansion, which carries
    /// more digits than binary64 needs).
    pub fn to_f64(&self) -> f64 {
        if self.value.is_nan() {
            return f64::NAN;
        }
        if self.value.is_inf_pos() {
            return f64::INFINITY;
        }
        if self.value.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        self.value
            .to_string()
            .parse::<f64>()
            .unwrap_or(f64::NAN)
    }

    /// Natural logarithm; NaN for non-positive input.
    pub fn ln(&self) -> Self {
        let mut consts = Consts::new().expect("astro-float constant cache");
        Self {
            value: self.value.ln(self.bits, RM, &mut consts),
            bits: self.bits,
        }
    }

    pub fn abs(&self) -> Self {
        Self {
            value: self.value.abs(),
            bits: self.bits,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.value.is_positive() && !self.value.is_zero()
    }

    fn wrap(value: BigFloat, bits: usize) -> Self {
        Self { value, bits }
    }
}

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExtReal({}; {} bits)", self.value, self.bits)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl PartialEq for ExtReal {
    fn eq(&self, other: &Self) -> bool {
        self.value.cmp(&other.value) == Some(0)
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value.cmp(&other.value).map(|s| s.cmp(&0))
    }
}

macro_rules! ext_binop {
    ($trait:ident, $method:ident) => {
        impl<'a> $trait<&'a ExtReal> for &'a ExtReal {
            type Output = ExtReal;

            fn $method(self, rhs: &'a ExtReal) -> ExtReal {
                let bits = self.bits.max(rhs.bits);
                ExtReal::wrap(self.value.$method(&rhs.value, bits, RM), bits)
            }
        }

        impl $trait for ExtReal {
            type Output = ExtReal;

            fn $method(self, rhs: ExtReal) -> ExtReal {
                (&self).$method(&rhs)
            }
        }
    };
}

ext_binop!(Add, add);
ext_binop!(Sub, sub);
ext_binop!(Mul, mul);
ext_binop!(Div, div);

impl Neg for &ExtReal {
    type Output = ExtReal;

    fn neg(self) -> ExtReal {
        ExtReal::wrap(self.value.clone().neg(), self.bits)
    }
}

/// A unit-determinant real 2×2 matrix in extended precision.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtMoebius {
    a: ExtReal,
    b: ExtReal,
    c: ExtReal,
    d: ExtReal,
}

impl ExtMoebius {
    /// Coefficients are taken as given; the caller is responsible for a
    /// unit determinant.
    pub fn from_coefficients(a: ExtReal, b: ExtReal, c: ExtReal, d: ExtReal) -> Self {
        Self { a, b, c, d }
    }

    pub fn from_map(m: &MoebiusMap, bits: usize) -> Self {
        let [a, b, c, d] = m.coefficients().map(|v| ExtReal::from_f64(v, bits));
        Self { a, b, c, d }
    }

    pub fn identity(bits: usize) -> Self {
        Self::from_map(&MoebiusMap::IDENTITY, bits)
    }

    /// The generator with index `n` of the δ-family, evaluated directly in
    /// extended precision from its closed forms
    /// `a = δ + 2n/(n²+1)`, `b = n + (n²+1)δ`, `c = 1/n`, `d = (n²+1)/n`.
    pub fn generator(n: u64, delta: f64, bits: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("generator index must be ≥ 1".into()));
        }
        let one = ExtReal::from_u64(1, bits);
        let two = ExtReal::from_u64(2, bits);
        let n = ExtReal::from_u64(n, bits);
        let delta = ExtReal::from_f64(delta, bits);
        let n2p1 = &(&n * &n) + &one;
        Ok(Self {
            a: &delta + &(&(&two * &n) / &n2p1),
            b: &n + &(&n2p1 * &delta),
            c: &one / &n,
            d: &n2p1 / &n,
        })
    }

    pub fn coefficients(&self) -> [&ExtReal; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn det(&self) -> ExtReal {
        &(&self.a * &self.d) - &(&self.b * &self.c)
    }

    pub fn trace(&self) -> ExtReal {
        &self.a + &self.d
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Self) -> Self {
        let (u, v) = (self, other);
        Self {
            a: &(&u.a * &v.a) + &(&u.b * &v.c),
            b: &(&u.a * &v.b) + &(&u.b * &v.d),
            c: &(&u.c * &v.a) + &(&u.d * &v.c),
            d: &(&u.c * &v.b) + &(&u.d * &v.d),
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d.clone(),
            b: -&self.b,
            c: -&self.c,
            d: self.a.clone(),
        }
    }

    /// `m(x + iy)` as `(Re, Im)`.
    pub fn apply(&self, x: &ExtReal, y: &ExtReal) -> (ExtReal, ExtReal) {
        let nr = &(&self.a * x) + &self.b;
        let ni = &self.a * y;
        let dr = &(&self.c * x) + &self.d;
        let di = &self.c * y;
        let den = &(&dr * &dr) + &(&di * &di);
        let re = &(&(&nr * &dr) + &(&ni * &di)) / &den;
        let im = &(&(&ni * &dr) - &(&nr * &di)) / &den;
        (re, im)
    }

    /// `Im(m⁻¹(i)) = 1/(a² + c²)`, in binary64.
    pub fn inverse_height_at_i(&self) -> f64 {
        let s = &(&self.a * &self.a) + &(&self.c * &self.c);
        (&ExtReal::from_u64(1, s.bits()) / &s).to_f64()
    }

    /// `B_∞(m⁻¹ i, i) = −ln Im(m⁻¹(i)) = ln(a² + c²)`.
    pub fn busemann_value(&self) -> f64 {
        let s = &(&self.a * &self.a) + &(&self.c * &self.c);
        s.ln().to_f64()
    }

    /// `a/c`, or `None` when the map fixes `∞`.
    pub fn image_of_infinity(&self) -> Option<f64> {
        if self.c.is_zero() {
            None
        } else {
            Some((&self.a / &self.c).to_f64())
        }
    }

    /// Rounds to a binary64 map.
    pub fn to_moebius(&self) -> Result<MoebiusMap> {
        MoebiusMap::new(self.a.to_f64(), self.b.to_f64(), self.c.to_f64(), self.d.to_f64())
    }
}
