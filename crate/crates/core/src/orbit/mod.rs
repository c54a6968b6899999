//! Dynamics along the ray `t ↦ g_t(u₀)`, `u₀` the upward vector at `i`.
//!
//! [`injectivity`] bounds `d(ie^t, γ(ie^t))` from below, [`limits`] follows
//! Busemann values along sequences of group elements, and [`times`] turns
//! those limits into certified return times.

pub mod injectivity;
pub mod limits;
pub mod times;

pub use injectivity::{
    fineness_scan, ft_minimizer, ft_value, injectivity_estimate, pcl_bound_neg, pcl_bound_pos,
    pcl_distance_neg, pcl_distance_pos, pcl_distance_pos_closed, FinenessEstimate, FtMinimum,
};
pub use limits::{
    busemann_limit, busemann_limit_extended, generator_family, pair_family, BusemannLimit,
    FamilyMember, GroupFamily, SecondIndex,
};
pub use times::{detect_time, fibonacci_times, FibonacciTimes, TimeDetection, TimeEntry, TimeSearch};
