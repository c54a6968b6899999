//! Plane hyperbolic geometry in the upper half-plane model.
//!
//! Everything here is a pure function of immutable `Copy` values.

mod busemann;
mod flow;
mod geodesic;
mod moebius;
mod point;

pub use busemann::{busemann, busemann_infinity};
pub use flow::{geodesic_flow, horocycle_flow, UnitTangent};
pub use geodesic::{dist_to_geodesic, distance, Geodesic};
pub(crate) use moebius::det2;
pub use moebius::MoebiusMap;
pub use point::{BoundaryPoint, UpperHalfPoint};
