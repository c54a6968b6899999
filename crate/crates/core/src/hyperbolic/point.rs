use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point `x + iy` of the upper half-plane, `y > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpperHalfPoint {
    x: f64,
    y: f64,
}

impl UpperHalfPoint {
    /// The point `i`.
    pub const I: Self = Self { x: 0.0, y: 1.0 };

    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() || y <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "({x}, {y}) is not a point of the upper half-plane"
            )));
        }
        Ok(Self { x, y })
    }

    /// The point `i·height` on the imaginary axis.
    pub fn on_imaginary_axis(height: f64) -> Result<Self> {
        Self::new(0.0, height)
    }

    /// Caller guarantees `y > 0`.
    pub(crate) fn new_unchecked(x: f64, y: f64) -> Self {
        debug_assert!(y > 0.0, "imaginary part {y} must be positive");
        Self { x, y }
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.x
    }

    #[inline]
    pub fn y(&self) -> f64 {
        self.y
    }

    /// `|z|²`
    #[inline]
    pub fn norm_sqr(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    /// Euclidean distance in the plane.
    pub fn euclidean_distance(&self, other: &Self) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Hyperbolic distance, see [`distance`](super::distance).
    pub fn distance(&self, other: &Self) -> f64 {
        super::distance(*self, *other)
    }
}

impl fmt::Display for UpperHalfPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i", self.x, self.y)
    }
}

/// A point of `∂ℍ = ℝ ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BoundaryPoint {
    Finite(f64),
    Infinity,
}

impl BoundaryPoint {
    pub fn is_infinite(&self) -> bool {
        matches!(self, BoundaryPoint::Infinity)
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            BoundaryPoint::Finite(x) => Some(x),
            BoundaryPoint::Infinity => None,
        }
    }

    /// `|ξ|`, infinite for the point at infinity.
    pub fn magnitude(&self) -> f64 {
        match *self {
            BoundaryPoint::Finite(x) => x.abs(),
            BoundaryPoint::Infinity => f64::INFINITY,
        }
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryPoint::Finite(x) => write!(f, "{x}"),
            BoundaryPoint::Infinity => f.write_str("∞"),
        }
    }
}
