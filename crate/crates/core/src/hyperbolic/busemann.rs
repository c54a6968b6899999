use super::{BoundaryPoint, UpperHalfPoint};

/// `B_∞(z, w) = ln(Im w / Im z)`.
///
/// Positive when `w` sits on a higher horocycle than `z`.
pub fn busemann_infinity(z: UpperHalfPoint, w: UpperHalfPoint) -> f64 {
    (w.y() / z.y()).ln()
}

/// Busemann cocycle `B_ξ(z, w)` centred at a boundary point.
///
/// For finite `ξ` this is `B_∞` after transporting `ξ` to `∞`, which gives
/// `ln((Im w / |w − ξ|²) / (Im z / |z − ξ|²))` for every choice of transport.
pub fn busemann(xi: BoundaryPoint, z: UpperHalfPoint, w: UpperHalfPoint) -> f64 {
    match xi {
        BoundaryPoint::Infinity => busemann_infinity(z, w),
        BoundaryPoint::Finite(x0) => {
            let height = |p: UpperHalfPoint| {
                let dx = p.x() - x0;
                p.y() / (dx * dx + p.y() * p.y())
            };
            (height(w) / height(z)).ln()
        }
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;
    use crate::hyperbolic::MoebiusMap;

    fn pt(x: f64, y: f64) -> UpperHalfPoint {
        UpperHalfPoint::new(x, y).unwrap()
    }

    #[test]
    fn at_infinity() {
        assert_relative_eq!(busemann_infinity(UpperHalfPoint::I, pt(0.0, 2.0)), 2f64.ln());
        assert_eq!(busemann_infinity(pt(3.0, 0.7), pt(3.0, 0.7)), 0.0);
        let z = pt(1.0, 3.0);
        let w = pt(-2.0, 0.5);
        assert_eq!(busemann(BoundaryPoint::Infinity, z, w), busemann_infinity(z, w));
        assert_eq!(busemann_infinity(z, w), -busemann_infinity(w, z));
    }

    #[test]
    fn centred_at_zero_by_transport() {
        let b = busemann(BoundaryPoint::Finite(0.0), UpperHalfPoint::I, pt(0.0, 0.25));
        // M(z) = −1/z sends 0 to ∞, i to i and i/4 to 4i
        let m = MoebiusMap::new(0.0, -1.0, 1.0, 0.0).unwrap();
        let transported = busemann_infinity(m.apply(UpperHalfPoint::I), m.apply(pt(0.0, 0.25)));
        assert_relative_eq!(b, 4f64.ln(), max_relative = 1e-14);
        assert_relative_eq!(b, transported, max_relative = 1e-14);
    }

    #[test]
    fn independent_of_transport_choice() {
        let xi = 1.7;
        let (z, w) = (pt(-0.4, 2.0), pt(3.3, 0.1));
        // two different maps sending 1.7 to ∞
        let m1 = MoebiusMap::new(0.0, -1.0, 1.0, -xi).unwrap();
        let m2 = MoebiusMap::new(2.0, -5.0, 1.0, -xi).unwrap();
        let b1 = busemann_infinity(m1.apply(z), m1.apply(w));
        let b2 = busemann_infinity(m2.apply(z), m2.apply(w));
        let b = busemann(BoundaryPoint::Finite(xi), z, w);
        assert_relative_eq!(b, b1, max_relative = 1e-12);
        assert_relative_eq!(b, b2, max_relative = 1e-12);
    }
}
