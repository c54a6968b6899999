//! Strategies and property bodies shared by the property and acceptance targets.
#![allow(dead_code)]

use horoflow::hyperbolic::{
    busemann, dist_to_geodesic, distance, BoundaryPoint, Geodesic, MoebiusMap, UpperHalfPoint,
};
use horoflow::schottky::{index_sequence, SurfaceParameter};
use horoflow::words::{enumerate_reduced_words, reduced_word_count, Alphabet, WordBudget};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

pub const CASES: u32 = 1000;

/// A runner with a fixed seed, so acceptance output is reproducible.
pub fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

pub fn point() -> impl Strategy<Value = UpperHalfPoint> {
    (-5.0..5.0f64, 0.1..5.0f64).prop_map(|(x, y)| UpperHalfPoint::new(x, y).unwrap())
}

/// `translation(s) ∘ dilation(λ) ∘ rotation(θ)` about `i`: every orientation
/// preserving isometry has this form, and the ranges keep entries moderate.
pub fn isometry() -> impl Strategy<Value = MoebiusMap> {
    (-5.0..5.0f64, -2.0..2.0f64, 0.0..std::f64::consts::TAU).prop_map(|(s, l, th)| {
        let (sin, cos) = (0.5 * th).sin_cos();
        let rot = MoebiusMap::new(cos, sin, -sin, cos).unwrap();
        MoebiusMap::translation(s)
            .compose(&MoebiusMap::dilation(l.exp()).unwrap())
            .compose(&rot)
    })
}

pub fn geodesic() -> impl Strategy<Value = Geodesic> {
    prop_oneof![
        (-5.0..5.0f64).prop_map(|x| Geodesic::vertical(x).unwrap()),
        (-5.0..5.0f64, 0.2..6.0f64).prop_map(|(u, w)| Geodesic::semicircle(u, u + w).unwrap()),
    ]
}

pub fn check_isometry_invariance(
    m: &MoebiusMap,
    z: UpperHalfPoint,
    w: UpperHalfPoint,
) -> Result<(), TestCaseError> {
    let before = distance(z, w);
    let after = distance(m.apply(z), m.apply(w));
    prop_assert!((after - before).abs() <= 1e-9, "{before} vs {after}");
    Ok(())
}

pub fn check_busemann_equivariance(
    m: &MoebiusMap,
    xi: f64,
    z: UpperHalfPoint,
    w: UpperHalfPoint,
) -> Result<(), TestCaseError> {
    let xi = BoundaryPoint::Finite(xi);
    let lhs = busemann(m.apply_boundary(xi), m.apply(z), m.apply(w));
    let rhs = busemann(xi, z, w);
    prop_assert!((lhs - rhs).abs() <= 1e-9, "{lhs} vs {rhs}");
    Ok(())
}

pub fn check_cocycle(
    xi: Option<f64>,
    z: UpperHalfPoint,
    w: UpperHalfPoint,
    v: UpperHalfPoint,
) -> Result<(), TestCaseError> {
    let xi = xi.map_or(BoundaryPoint::Infinity, BoundaryPoint::Finite);
    let sum = busemann(xi, z, w) + busemann(xi, w, v);
    let direct = busemann(xi, z, v);
    prop_assert!((sum - direct).abs() <= 1e-10, "{sum} vs {direct}");
    Ok(())
}

/// Minimum of `d(z, g(s))` over a grid in arc length, refined by golden
/// section around the best grid point. Uses only `distance` and `point_at`.
pub fn sampled_distance(z: UpperHalfPoint, g: &Geodesic) -> f64 {
    let f = |s: f64| distance(z, g.point_at(s));
    let (lo, hi, n) = (-25.0, 25.0, 5000);
    let step = (hi - lo) / n as f64;
    let best = (0..=n)
        .map(|k| lo + step * k as f64)
        .min_by(|a, b| f(*a).total_cmp(&f(*b)))
        .unwrap();
    let (mut a, mut b) = (best - step, best + step);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let c = b - r * (b - a);
        let d = a + r * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    f(0.5 * (a + b)).min(f(best))
}

pub fn check_distance_oracle(z: UpperHalfPoint, g: &Geodesic) -> Result<(), TestCaseError> {
    let closed = dist_to_geodesic(z, g);
    let sampled = sampled_distance(z, g);
    prop_assert!((closed - sampled).abs() <= 1e-6, "{closed} vs {sampled} for {g:?}");
    Ok(())
}

/// Counts words with no adjacent `x x⁻¹` by brute force over all sequences.
pub fn brute_force_reduced_count(k: usize, max_length: usize) -> u64 {
    let letters = 2 * k;
    let mut total = 0;
    for len in 1..=max_length {
        for mut code in 0..letters.pow(len as u32) {
            let mut prev: Option<usize> = None;
            let mut ok = true;
            for _ in 0..len {
                let l = code % letters;
                code /= letters;
                if prev.is_some_and(|p| p ^ 1 == l) {
                    ok = false;
                    break;
                }
                prev = Some(l);
            }
            total += ok as u64;
        }
    }
    total
}

pub fn check_free_group_count(k: usize, max_length: usize) -> Result<(), TestCaseError> {
    let delta = SurfaceParameter::new(3.0).unwrap();
    let alphabet = Alphabet::new(&index_sequence(&delta, k).unwrap(), k).unwrap();
    let words = enumerate_reduced_words(&alphabet, max_length, &WordBudget::default()).unwrap();
    let mut n = 0u64;
    for w in words {
        prop_assert!(w.is_reduced());
        n += 1;
    }
    prop_assert_eq!(Some(n), reduced_word_count(k as u64, max_length as u32));
    prop_assert_eq!(n, brute_force_reduced_count(k, max_length));
    Ok(())
}
