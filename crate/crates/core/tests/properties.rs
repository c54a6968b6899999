mod common;

use common::*;
use horoflow::hyperbolic::{
    geodesic_flow, horocycle_flow, MoebiusMap, UnitTangent, UpperHalfPoint,
};
use horoflow::precision::ExtMoebius;
use horoflow::schottky::{index_sequence, make_generator, IsometryCircle, Side, SurfaceParameter};
use horoflow::words::{
    enumerate_reduced_words, max_height, Alphabet, Letter, ReducedWord, WordBudget,
};
use proptest::prelude::*;

fn delta3() -> SurfaceParameter {
    SurfaceParameter::new(3.0).unwrap()
}

fn alphabet(k: usize) -> Alphabet {
    Alphabet::new(&index_sequence(&delta3(), k).unwrap(), k).unwrap()
}

fn letter() -> impl Strategy<Value = Letter> {
    (1u32..=4, any::<bool>()).prop_map(|(p, inv)| Letter::new(p, inv).unwrap())
}

fn reduced_word() -> impl Strategy<Value = ReducedWord> {
    prop::collection::vec(letter(), 1..=6)
        .prop_map(|ls| ReducedWord::reduce(&alphabet(4), &ls).unwrap())
        .prop_filter("nonidentity", |w| !w.is_empty())
}

fn disk_side(l: Letter) -> Side {
    if l.is_inverse() {
        Side::Negative
    } else {
        Side::Positive
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn isometries_preserve_distance(m in isometry(), z in point(), w in point()) {
        check_isometry_invariance(&m, z, w)?;
    }

    #[test]
    fn busemann_is_equivariant(m in isometry(), xi in -10.0..10.0f64, z in point(), w in point()) {
        check_busemann_equivariance(&m, xi, z, w)?;
    }

    #[test]
    fn busemann_is_a_cocycle(
        xi in prop::option::of(-10.0..10.0f64),
        z in point(), w in point(), v in point(),
    ) {
        check_cocycle(xi, z, w, v)?;
    }

    #[test]
    fn height_scales_by_derivative(m in isometry(), z in point()) {
        let lhs = m.apply(z).y();
        let rhs = z.y() * m.derivative_modulus(z);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
    }

    #[test]
    fn geodesic_distance_matches_sampling(z in point(), g in geodesic()) {
        check_distance_oracle(z, &g)?;
    }

    #[test]
    fn flows_commute_up_to_rescaling(s in -5.0..5.0f64, t in -3.0..3.0f64) {
        let u0 = UnitTangent::reference();
        let lhs = geodesic_flow(&horocycle_flow(&u0, s), t);
        let rhs = horocycle_flow(&geodesic_flow(&u0, t), s * (-t).exp());
        prop_assert!(lhs.approx_eq(&rhs, 1e-9));
    }

    #[test]
    fn composition_is_associative(a in isometry(), b in isometry(), c in isometry()) {
        let left = a.compose(&b).compose(&c);
        let right = a.compose(&b.compose(&c));
        prop_assert!(left.approx_eq(&right, 1e-12 * a.scale() * b.scale() * c.scale()));
        prop_assert!(a.compose(&a.inverse()).approx_eq(&MoebiusMap::IDENTITY, 1e-12 * a.scale()));
        prop_assert!(a.inverse().compose(&a).approx_eq(&MoebiusMap::IDENTITY, 1e-12 * a.scale()));
    }

    #[test]
    fn reduced_words_are_counted(k in 1usize..=4, len in 1usize..=4) {
        check_free_group_count(k, len)?;
    }

    #[test]
    fn suffix_images_lie_in_the_leading_disk(w in reduced_word()) {
        let alpha = alphabet(4);
        let letters = w.letters();
        let mut z = UpperHalfPoint::I;
        for &l in letters.iter().rev() {
            z = alpha.map(l).apply(z);
            let circle = IsometryCircle::new(alpha.index_of(l), &delta3()).unwrap();
            prop_assert!(circle.disk_contains(disk_side(l), z), "{} at {l:?}", alpha.render(&w));
        }
    }

    #[test]
    fn derivative_telescopes_along_suffixes(w in reduced_word()) {
        let alpha = alphabet(4);
        let mut z = UpperHalfPoint::I;
        let mut product = 1.0;
        for &l in w.letters().iter().rev() {
            product *= alpha.map(l).derivative_modulus(z);
            z = alpha.map(l).apply(z);
        }
        let direct = w.matrix().derivative_modulus(UpperHalfPoint::I);
        prop_assert!((product - direct).abs() <= 1e-8 * direct, "{} {product} {direct}", alpha.render(&w));
    }

    #[test]
    fn recurrence_inequality_holds(num in 11u32..=200) {
        let delta = SurfaceParameter::new(f64::from(num) / 10.0).unwrap();
        let seq = index_sequence(&delta, 12).unwrap();
        for w in seq.entries().windows(2) {
            prop_assert!(delta.recurrence_gap(w[0], w[1]) > 0.0);
        }
    }

    #[test]
    fn generators_are_hyperbolic(n in 1u64..=1_000_000, num in 11u32..=200) {
        let delta = SurfaceParameter::new(f64::from(num) / 10.0).unwrap();
        prop_assert!(make_generator(n, &delta).unwrap().trace() > 2.0);
    }

    #[test]
    fn isometry_circle_is_the_unit_derivative_locus(
        k in 1usize..=10,
        theta in 0.05..3.09f64,
        scale in 0.5..0.99f64,
    ) {
        let p = index_sequence(&delta3(), k).unwrap().last();
        let inv = make_generator(p, &delta3()).unwrap().to_map().inverse();
        let c = IsometryCircle::new(p, &delta3()).unwrap();
        let on = c.point(Side::Positive, theta);
        prop_assert!((inv.derivative_modulus(on) - 1.0).abs() < 1e-9);
        let centre = c.center(Side::Positive);
        let inside = UpperHalfPoint::new(
            centre + scale * (on.x() - centre),
            scale * on.y(),
        ).unwrap();
        let outside = UpperHalfPoint::new(
            centre + (on.x() - centre) / scale,
            on.y() / scale,
        ).unwrap();
        prop_assert!(inv.derivative_modulus(inside) > 1.0);
        prop_assert!(inv.derivative_modulus(outside) < 1.0);
    }

    #[test]
    fn composing_far_apart_witnesses_adds_times(m in 8usize..=10, n in 26usize..=32) {
        // ln(a² + c²) of h_{p_m} h_{p_n} exceeds the sum by about 2p_m²/(δ p_n)
        let seq = index_sequence(&delta3(), n).unwrap();
        let (p, q) = (seq.get(m - 1).unwrap(), seq.last());
        let tol = 2e-2;
        let t0 = 2.0 * 3f64.ln();
        let gs = ExtMoebius::generator(p, 3.0, 192).unwrap();
        let gt = ExtMoebius::generator(q, 3.0, 192).unwrap();
        prop_assert!((gs.busemann_value() - t0).abs() < tol);
        prop_assert!((gt.busemann_value() - t0).abs() < tol);
        let both = gs.compose(&gt).busemann_value();
        prop_assert!((both - 2.0 * t0).abs() < 2.0 * tol, "{both}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn max_height_is_monotone_in_length(k in 1usize..=3) {
        let alpha = alphabet(k);
        let mut prev = 0.0;
        for len in 1..=4 {
            let (h, _) = max_height(enumerate_reduced_words(&alpha, len, &WordBudget::default()).unwrap());
            prop_assert!(h >= prev);
            prev = h;
        }
    }
}
