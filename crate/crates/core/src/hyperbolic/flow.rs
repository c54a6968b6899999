use serde::{Deserialize, Serialize};

use super::{BoundaryPoint, MoebiusMap, UpperHalfPoint};
use crate::error::Result;

/// A unit tangent vector of the upper half-plane, encoded by its frame: the
/// unique isometry carrying the reference vector (based at `i`, pointing
/// up towards `∞`) onto it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitTangent {
    frame: MoebiusMap,
}

impl UnitTangent {
    /// The reference vector at `i` pointing towards `∞`.
    pub fn reference() -> Self {
        Self {
            frame: MoebiusMap::IDENTITY,
        }
    }

    pub fn from_frame(frame: MoebiusMap) -> Self {
        Self { frame }
    }

    /// The vector based at `z` pointing straight up.
    pub fn upward_at(z: UpperHalfPoint) -> Result<Self> {
        let s = z.y().sqrt();
        Ok(Self {
            frame: MoebiusMap::new(s, z.x() / s, 0.0, 1.0 / s)?,
        })
    }

    pub fn frame(&self) -> &MoebiusMap {
        &self.frame
    }

    pub fn basepoint(&self) -> UpperHalfPoint {
        self.frame.apply(UpperHalfPoint::I)
    }

    /// Endpoint of the forward geodesic ray.
    pub fn forward_endpoint(&self) -> BoundaryPoint {
        self.frame.apply_boundary(BoundaryPoint::Infinity)
    }

    pub fn backward_endpoint(&self) -> BoundaryPoint {
        self.frame.apply_boundary(BoundaryPoint::Finite(0.0))
    }

    /// Geodesic flow `g_t`: right multiplication by `diag(e^{t/2}, e^{−t/2})`.
    pub fn geodesic_flow(&self, t: f64) -> Self {
        let h = (0.5 * t).exp();
        let a_t = MoebiusMap::new(h, 0.0, 0.0, 1.0 / h).expect("diagonal with positive entries");
        Self {
            frame: self.frame.compose(&a_t),
        }
    }

    /// Horocyclic flow `h_s`: right multiplication by `[[1, s], [0, 1]]`.
    ///
    /// The reference vector moves to base point `s + i`; positive `s` moves in
    /// the `+x` direction along the horocycle `Im z = 1`.
    pub fn horocycle_flow(&self, s: f64) -> Self {
        Self {
            frame: self.frame.compose(&MoebiusMap::translation(s)),
        }
    }

    /// Left action of an isometry (deck transformation).
    pub fn transported_by(&self, m: &MoebiusMap) -> Self {
        Self {
            frame: m.compose(&self.frame),
        }
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.frame.approx_eq(&other.frame, tol)
    }
}

/// `g_t(u)`
pub fn geodesic_flow(u: &UnitTangent, t: f64) -> UnitTangent {
    u.geodesic_flow(t)
}

/// `h_s(u)`
pub fn horocycle_flow(u: &UnitTangent, s: f64) -> UnitTangent {
    u.horocycle_flow(s)
}
