use serde::{Deserialize, Serialize};

use super::{BoundaryPoint, UpperHalfPoint};
use crate::error::{Error, Result};

/// Hyperbolic distance `d(z, w)`, with `cosh d = 1 + |z − w|² / (2 Im z Im w)`.
///
/// Evaluated as `2 asinh(|z − w| / (2 √(Im z Im w)))`, which keeps full
/// relative accuracy for nearby points.
pub fn distance(z: UpperHalfPoint, w: UpperHalfPoint) -> f64 {
    let chord = z.euclidean_distance(&w);
    2.0 * (chord / (2.0 * (z.y() * w.y()).sqrt())).asinh()
}

/// A complete geodesic of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Geodesic {
    /// The vertical line `Re z = foot`, ending at `foot` and `∞`.
    Vertical { foot: f64 },
    /// The Euclidean semicircle with real endpoints `left < right`.
    Semicircle { left: f64, right: f64 },
}

impl Geodesic {
    pub fn vertical(foot: f64) -> Result<Self> {
        if !foot.is_finite() {
            return Err(Error::InvalidParameter(format!("vertical foot {foot}")));
        }
        Ok(Geodesic::Vertical { foot })
    }

    /// Semicircle with endpoints `u` and `v` in either order.
    pub fn semicircle(u: f64, v: f64) -> Result<Self> {
        if !u.is_finite() || !v.is_finite() || u == v {
            return Err(Error::InvalidParameter(format!(
                "semicircle endpoints {u}, {v} must be finite and distinct"
            )));
        }
        Ok(Geodesic::Semicircle {
            left: u.min(v),
            right: u.max(v),
        })
    }

    /// The geodesic joining two distinct boundary points.
    pub fn through(p: BoundaryPoint, q: BoundaryPoint) -> Result<Self> {
        match (p, q) {
            (BoundaryPoint::Finite(u), BoundaryPoint::Finite(v)) => Self::semicircle(u, v),
            (BoundaryPoint::Finite(x), BoundaryPoint::Infinity)
            | (BoundaryPoint::Infinity, BoundaryPoint::Finite(x)) => Self::vertical(x),
            (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => Err(Error::InvalidParameter(
                "a geodesic needs two distinct endpoints".into(),
            )),
        }
    }

    pub fn endpoints(&self) -> (BoundaryPoint, BoundaryPoint) {
        match *self {
            Geodesic::Vertical { foot } => (BoundaryPoint::Finite(foot), BoundaryPoint::Infinity),
            Geodesic::Semicircle { left, right } => {
                (BoundaryPoint::Finite(left), BoundaryPoint::Finite(right))
            }
        }
    }

    /// Euclidean centre and radius of a semicircle.
    pub fn center_radius(&self) -> Option<(f64, f64)> {
        match *self {
            Geodesic::Vertical { .. } => None,
            Geodesic::Semicircle { left, right } => {
                Some((0.5 * (left + right), 0.5 * (right - left)))
            }
        }
    }

    /// Unit-speed parametrization by signed arc length `s`.
    ///
    /// Semicircles start at their top point and run towards `right` as
    /// `s → +∞`; vertical lines start at height 1.
    pub fn point_at(&self, s: f64) -> UpperHalfPoint {
        match *self {
            Geodesic::Vertical { foot } => UpperHalfPoint::new_unchecked(foot, s.exp()),
            Geodesic::Semicircle { .. } => {
                let (m, r) = self.center_radius().expect("semicircle");
                UpperHalfPoint::new_unchecked(m + r * s.tanh(), r / s.cosh())
            }
        }
    }

    /// Distance from `z` to the geodesic.
    ///
    /// Vertical line at `x₀`: `sinh d = |x − x₀| / y`.
    /// Semicircle `(u, v)`: `sinh d = |(x − u)(x − v) + y²| / (y |u − v|)`,
    /// i.e. `||z|² − (u + v)x + uv| / (y |u − v|)`.
    pub fn distance_to(&self, z: UpperHalfPoint) -> f64 {
        let (x, y) = (z.x(), z.y());
        match *self {
            Geodesic::Vertical { foot } => ((x - foot).abs() / y).asinh(),
            Geodesic::Semicircle { left, right } => {
                let power = (x - left) * (x - right) + y * y;
                (power.abs() / (y * (right - left))).asinh()
            }
        }
    }

    /// Whether `z` lies on the geodesic, up to a hyperbolic distance `tol`.
    pub fn contains(&self, z: UpperHalfPoint, tol: f64) -> bool {
        self.distance_to(z) <= tol
    }
}

/// Free-function form of [`Geodesic::distance_to`].
pub fn dist_to_geodesic(z: UpperHalfPoint, g: &Geodesic) -> f64 {
    g.distance_to(z)
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;
    use crate::hyperbolic::MoebiusMap;

    fn pt(x: f64, y: f64) -> UpperHalfPoint {
        UpperHalfPoint::new(x, y).unwrap()
    }

    /// Length of the geodesic arc from `z` to `w`, integrating `|dz|/y` with
    /// the midpoint rule. Independent of the closed-form distance.
    fn midpoint_geodesic_length(z: UpperHalfPoint, w: UpperHalfPoint, pieces: usize) -> f64 {
        if (z.x() - w.x()).abs() < 1e-15 {
            // vertical arc: ∫ dy / y
            let (lo, hi) = (z.y().min(w.y()), z.y().max(w.y()));
            let h = (hi - lo) / pieces as f64;
            return (0..pieces)
                .map(|k| h / (lo + (k as f64 + 0.5) * h))
                .sum();
        }
        // semicircle through both points, centre m on the real axis
        let m = (w.norm_sqr() - z.norm_sqr()) / (2.0 * (w.x() - z.x()));
        let angle = |p: UpperHalfPoint| p.y().atan2(p.x() - m);
        let (t0, t1) = (angle(z), angle(w));
        let h = (t1 - t0) / pieces as f64;
        // ds/y = dθ / sin θ on any semicircle
        (0..pieces)
            .map(|k| (h / (t0 + (k as f64 + 0.5) * h).sin()).abs())
            .sum()
    }

    #[test]
    fn vertical_arc_length() {
        assert_relative_eq!(distance(UpperHalfPoint::I, pt(0.0, 1f64.exp())), 1.0, max_relative = 1e-15);
        assert_eq!(distance(pt(0.3, 2.0), pt(0.3, 2.0)), 0.0);
    }

    #[test]
    fn distance_i_to_h2_i_matches_length_oracle() {
        let h2 = MoebiusMap::new(3.8, 17.0, 0.5, 2.5).unwrap();
        let w = h2.apply(UpperHalfPoint::I);
        let closed = distance(UpperHalfPoint::I, w);
        let oracle = midpoint_geodesic_length(UpperHalfPoint::I, w, 200_000);
        assert_relative_eq!(closed, oracle, max_relative = 1e-8);
        let arccosh_form = (1.0 + (w.x().powi(2) + (1.0 - w.y()).powi(2)) / (2.0 * w.y())).acosh();
        assert_relative_eq!(closed, arccosh_form, max_relative = 1e-12);
        assert!((closed - 5.736).abs() < 5e-4, "{closed}");
    }

    #[test]
    fn distance_to_vertical_axis() {
        let g = Geodesic::vertical(0.0).unwrap();
        assert_relative_eq!(g.distance_to(pt(1.0, 1.0)), 1f64.asinh(), max_relative = 1e-15);
        assert_relative_eq!(g.distance_to(pt(1.0, 1.0)), 0.881_373_587_019_543, max_relative = 1e-12);
        assert_eq!(g.distance_to(pt(0.0, 5.0)), 0.0);
    }

    #[test]
    fn i_lies_on_unit_semicircle() {
        let g = Geodesic::semicircle(-1.0, 1.0).unwrap();
        assert_eq!(g.distance_to(UpperHalfPoint::I), 0.0);
    }

    #[test]
    fn height_one_point_to_small_negative_circle() {
        // S₋₂ for any δ: endpoints p − 1 − p² = −3 and −p − 1 − p² = −7
        let g = Geodesic::semicircle(-3.0, -7.0).unwrap();
        let d = g.distance_to(UpperHalfPoint::I);
        assert_relative_eq!(d, (22.0_f64 / 4.0).asinh(), max_relative = 1e-14);
        // grid-minimization oracle
        let oracle = (-200_000..=200_000)
            .map(|k| distance(UpperHalfPoint::I, g.point_at(k as f64 * 5e-5)))
            .fold(f64::INFINITY, f64::min);
        assert!((d - oracle).abs() < 1e-6);
        assert!((d - 2.40606).abs() < 1e-5);
    }

    #[test]
    fn arc_length_parametrization_has_unit_speed() {
        let g = Geodesic::semicircle(-2.0, 7.0).unwrap();
        for s in [-3.0, -0.5, 0.0, 1.2, 4.0] {
            let d = distance(g.point_at(s), g.point_at(s + 0.25));
            assert_relative_eq!(d, 0.25, max_relative = 1e-9);
            assert!(g.distance_to(g.point_at(s)) < 1e-12);
        }
    }

    #[test]
    fn rejects_degenerate_geodesics() {
        assert!(Geodesic::semicircle(2.0, 2.0).is_err());
        assert!(Geodesic::through(BoundaryPoint::Infinity, BoundaryPoint::Infinity).is_err());
        assert_eq!(
            Geodesic::through(BoundaryPoint::Infinity, BoundaryPoint::Finite(3.0)).unwrap(),
            Geodesic::Vertical { foot: 3.0 }
        );
    }
}
