use num_bigint::BigInt;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use critorbit::dynamics::CubicMap;
use critorbit::exactpoly::{
    build_phin, build_qn, discriminant_v, dynatomic_product, format_cache_file, parse_cache_file, resultant_v,
    resultant_v_bareiss, BivariatePolynomial, NumericCurve, UnivariatePolynomial, Variable, DEFAULT_DEGREE_BUDGET,
};
use critorbit::monodromy::fiber_values;
use critorbit::monodromy::PeriodCurve;

const B: u32 = DEFAULT_DEGREE_BUDGET;

#[test]
fn product_of_exact_period_factors_is_q_n() {
    for n in 1..=6 {
        assert_eq!(dynatomic_product(n, B).unwrap(), build_qn(n, B).unwrap(), "n = {n}");
    }
}

#[test]
fn exact_period_degrees_follow_mobius_inversion() {
    let expected = [1, 2, 8, 24, 80, 232];
    for (n, &d) in (1..=6).zip(&expected) {
        assert_eq!(build_phin(n, B).unwrap().degree_v(), d, "n = {n}");
    }
}

#[test]
fn symmetry_sign_is_defined_up_to_six() {
    for n in 1..=6 {
        assert!(build_phin(n, B).unwrap().involution_symmetry_sign().is_some(), "n = {n}");
    }
}

#[test]
fn discriminant_of_period_three_matches_frozen_value() {
    // independent computation in a computer algebra system, primitive part
    let frozen = UnivariatePolynomial::from_coeffs(
        [
            (0, "13424896"),
            (2, "-45156096"),
            (4, "27932688"),
            (6, "671484816"),
            (8, "-2026476387"),
            (10, "1397571732"),
            (12, "8320240296"),
            (14, "-22671273060"),
            (16, "15841193328"),
        ]
        .iter()
        .fold(vec![BigInt::from(0); 17], |mut c, &(k, s)| {
            c[k] = s.parse().unwrap();
            c
        }),
    );
    let disc = discriminant_v(&build_phin(3, B).unwrap()).unwrap().primitive_part();
    let frozen = frozen.primitive_part();
    assert!(disc == frozen || disc == (&UnivariatePolynomial::constant(-1) * &frozen));
}

#[test]
fn discriminant_of_period_four_has_degree_72_and_is_squarefree() {
    let disc = discriminant_v(&build_phin(4, B).unwrap()).unwrap();
    assert_eq!(disc.degree(), Some(72));
    assert_eq!(disc.squarefree_part().degree(), Some(72));
}

#[test]
fn modular_and_sylvester_resultants_agree_on_period_curves() {
    for n in 2..=3 {
        let p = build_phin(n, B).unwrap();
        let dp = p.partial_derivative(Variable::V);
        assert_eq!(resultant_v(&p, &dp).unwrap(), resultant_v_bareiss(&p, &dp).unwrap(), "n = {n}");
    }
}

#[test]
fn cache_file_round_trip_is_byte_stable() {
    let p = build_phin(3, B).unwrap();
    let text = format_cache_file(3, &p);
    assert_eq!(text, format_cache_file(3, &p));
    let (n, q) = parse_cache_file(&text).unwrap();
    assert_eq!((n, &q), (3, &*p));
    assert!(text.starts_with("PHIN n=3 degv=8\n"));
}

#[test]
fn fiber_points_have_exact_period_numerically() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 1..=4 {
        let curve = PeriodCurve::new(n, B).unwrap();
        let mut checked = 0;
        while checked < 100 {
            let a = Complex64::from_polar(rng.gen_range(0.2..1.0), rng.gen_range(0.0..std::f64::consts::TAU));
            for v in fiber_values(&curve, a).unwrap() {
                let map = CubicMap::new(a, v);
                let w = map.iterate(a, n as usize).unwrap();
                assert!((w - a).norm() < 1e-8, "n = {n}, a = {a}, v = {v}: {:e}", (w - a).norm());
                checked += 1;
            }
        }
    }
}

#[test]
fn gradient_does_not_vanish_on_sampled_curve_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in 1..=4 {
        let p = build_phin(n, B).unwrap();
        let curve = PeriodCurve::new(n, B).unwrap();
        let pa = p.partial_derivative(Variable::A);
        let pv = p.partial_derivative(Variable::V);
        let (da, dv) = (NumericCurve::new(&pa), NumericCurve::new(&pv));
        let scale_a = pa.max_abs_coefficient_f64().max(1.0);
        let scale_v = pv.max_abs_coefficient_f64();
        let mut checked = 0;
        while checked < 200 {
            let a = Complex64::from_polar(rng.gen_range(0.1..2.0), rng.gen_range(0.0..std::f64::consts::TAU));
            for v in fiber_values(&curve, a).unwrap() {
                let (ga, gv) = (da.evaluate(a, v), dv.evaluate(a, v));
                assert!(ga.norm() / scale_a + gv.norm() / scale_v > 1e-6, "n = {n}, a = {a}, v = {v}");
                // the implicit slope from the expanded gradient matches the orbit form
                let slope = -ga / gv;
                let t = curve.equation().tangent(a, v);
                assert!((slope - t).norm() < 1e-3 * (1.0 + t.norm()), "n = {n}: {slope} vs {t}");
                checked += 1;
            }
        }
    }
}

fn small_poly() -> impl Strategy<Value = BivariatePolynomial> {
    prop::collection::vec(((0u32..3), (0u32..4), -5i64..=5), 1..7)
        .prop_map(BivariatePolynomial::from_terms)
        .prop_filter("positive degree in v", |p| p.degree_v() >= 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn resultant_swap_sign_and_sylvester_oracle(p in small_poly(), q in small_poly()) {
        let pq = resultant_v(&p, &q).unwrap();
        let qp = resultant_v(&q, &p).unwrap();
        let sign = if (p.degree_v() * q.degree_v()) % 2 == 1 { -1 } else { 1 };
        prop_assert_eq!(&pq, &(&UnivariatePolynomial::constant(sign) * &qp));
        prop_assert_eq!(&pq, &resultant_v_bareiss(&p, &q).unwrap());
    }

    #[test]
    fn no_zero_coefficients_and_degrees_match_support(p in small_poly(), q in small_poly()) {
        for r in [&p * &q, &p + &q, &p - &p] {
            prop_assert!(r.terms().all(|(_, _, c)| *c != BigInt::from(0)));
            prop_assert_eq!(r.degree_v(), r.terms().map(|(_, j, _)| j).max().unwrap_or(0));
            prop_assert_eq!(r.degree_a(), r.terms().map(|(i, _, _)| i).max().unwrap_or(0));
        }
    }

    #[test]
    fn exact_product_evaluates_as_float_product(p in small_poly(), q in small_poly(), re in -1.0f64..1.0, im in -1.0f64..1.0) {
        let a = Complex64::new(re, im);
        let v = Complex64::new(im, -re);
        let lhs = (&p * &q).evaluate(a, v);
        let rhs = p.evaluate(a, v) * q.evaluate(a, v);
        prop_assert!((lhs - rhs).norm() < 1e-9 * (1.0 + rhs.norm()));
    }
}
