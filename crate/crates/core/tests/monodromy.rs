use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use critorbit::exactpoly::DEFAULT_DEGREE_BUDGET;
use critorbit::monodromy::{
    circle_path, connected_components, fiber_at, involution_on_fiber, loop_permutation, match_roots,
    monodromy_at_infinity, near_symmetry_axes, track_path, MonodromySettings, PeriodCurve, TrackSettings,
};

const B: u32 = DEFAULT_DEGREE_BUDGET;

fn settings(seed: u64) -> MonodromySettings {
    MonodromySettings { seed, ..MonodromySettings::default() }
}

#[test]
fn period_two_and_three_curves_are_irreducible() {
    for n in 2..=3 {
        let curve = PeriodCurve::new(n, B).unwrap();
        let r = connected_components(&curve, &settings(1)).unwrap();
        assert_eq!(r.orbit_count, 1, "n = {n}");
        assert_eq!(r.orbit_sizes, vec![curve.degree_v()]);
        assert!(r.max_residual < 1e-8, "n = {n}: {:e}", r.max_residual);
        assert!(r.product_relation_holds, "n = {n}");
    }
}

#[test]
fn period_two_branch_points_are_plus_minus_two_thirds() {
    let curve = PeriodCurve::new(2, B).unwrap();
    let mut points: Vec<f64> = curve.branch_points(1e-8).unwrap().iter().map(|b| b.value.re).collect();
    points.sort_by(f64::total_cmp);
    assert_eq!(points.len(), 2);
    assert!((points[0] + 2.0 / 3.0).abs() < 1e-10 && (points[1] - 2.0 / 3.0).abs() < 1e-10);
}

#[test]
fn same_seed_gives_identical_generators() {
    let curve = PeriodCurve::new(3, B).unwrap();
    let first = connected_components(&curve, &settings(7)).unwrap();
    let second = connected_components(&curve, &settings(7)).unwrap();
    assert_eq!(first, second);
}

#[test]
fn halving_the_step_tolerance_leaves_generators_unchanged() {
    let curve = PeriodCurve::new(3, B).unwrap();
    let coarse = connected_components(&curve, &settings(3)).unwrap();
    let mut fine_settings = settings(3);
    fine_settings.track.separation_fraction = 1.0 / 6.0;
    let fine = connected_components(&curve, &fine_settings).unwrap();
    assert_eq!(coarse.base, fine.base);
    for (c, f) in coarse.generators.iter().zip(&fine.generators) {
        assert_eq!(c.permutation, f.permutation);
    }
    assert_eq!(coarse.infinity, fine.infinity);
}

#[test]
fn reversed_loop_inverts_the_generator() {
    let curve = PeriodCurve::new(3, B).unwrap();
    let s = settings(5);
    let r = connected_components(&curve, &s).unwrap();
    let base = fiber_at(&curve, r.base, s.track.residual_tol).unwrap();
    assert_eq!(base.roots, r.base_fiber);
    for g in r.generators.iter().take(6) {
        let (forward, _) = loop_permutation(&curve, &base, g.branch_point, g.radius, &s, false).unwrap();
        let (backward, _) = loop_permutation(&curve, &base, g.branch_point, g.radius, &s, true).unwrap();
        assert_eq!(forward, g.permutation);
        assert!(forward.then(&backward).is_identity());
    }
}

#[test]
fn path_followed_by_its_reversal_returns_every_root() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let curve = PeriodCurve::new(3, B).unwrap();
    for _ in 0..10 {
        let path: Vec<Complex64> = (0..5)
            .map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
            .collect();
        let Ok(fiber) = fiber_at(&curve, path[0], 1e-8) else { continue };
        let mut there_and_back = path.clone();
        there_and_back.extend(path.iter().rev().skip(1));
        let Ok(tracked) = track_path(&curve, &there_and_back, &fiber.roots, &TrackSettings::default()) else {
            continue;
        };
        assert!(match_roots(tracked.end(), &fiber.roots).unwrap().is_identity());
    }
}

#[test]
fn period_one_has_trivial_monodromy_at_infinity() {
    let curve = PeriodCurve::new(1, B).unwrap();
    let s = settings(0);
    let fiber = fiber_at(&curve, Complex64::new(3.0, 0.0), 1e-8).unwrap();
    let path = circle_path(Complex64::new(0.0, 0.0), 3.0, 0.0, 64);
    let tracked = track_path(&curve, &path, &fiber.roots, &s.track).unwrap();
    assert!(match_roots(tracked.end(), &fiber.roots).unwrap().is_identity());
    assert_eq!(fiber.roots.len(), 1);
    assert!((fiber.roots[0] - 3.0).norm() < 1e-10);
}

#[test]
fn infinity_cycle_type_is_stable_under_radius_doubling() {
    for n in 2..=3 {
        let curve = PeriodCurve::new(n, B).unwrap();
        let branch = curve.branch_points(1e-8).unwrap();
        let modulus = branch.iter().map(|b| b.value.norm()).fold(0.0, f64::max);
        let inf = monodromy_at_infinity(&curve, &branch, 4.0 * (1.0 + modulus), &settings(0)).unwrap();
        assert_eq!(inf.cycle_type.iter().sum::<usize>(), curve.degree_v());
    }
}

#[test]
fn involution_pairs_fiber_points_without_fixed_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for n in 2..=3 {
        let curve = PeriodCurve::new(n, B).unwrap();
        let branch = curve.branch_points(1e-8).unwrap();
        let s = settings(0);
        let mut checked = 0;
        while checked < 3 {
            let a0 = Complex64::from_polar(rng.gen_range(0.3..1.5), rng.gen_range(0.0..std::f64::consts::TAU));
            if near_symmetry_axes(a0, 0.05) {
                continue;
            }
            let fiber = fiber_at(&curve, a0, 1e-8).unwrap();
            let pairing = involution_on_fiber(&curve, &fiber, &branch, &s).unwrap();
            assert!(pairing.permutation.then(&pairing.permutation).is_identity(), "n = {n}");
            assert!(pairing.fixed_points.is_empty(), "n = {n}, a0 = {a0}");
            assert!(pairing.symmetry_residual < 1e-8, "n = {n}: {:e}", pairing.symmetry_residual);
            checked += 1;
        }
    }
}

#[test]
fn involution_at_one_swaps_the_golden_pair() {
    // Φ₂(1, v) = v² + v − 1; its roots are exchanged by the continuation to −1
    let curve = PeriodCurve::new(2, B).unwrap();
    let branch = curve.branch_points(1e-8).unwrap();
    let fiber = fiber_at(&curve, Complex64::new(1.0, 0.0), 1e-8).unwrap();
    for v in &fiber.roots {
        assert!((v * v + v - 1.0).norm() < 1e-12);
    }
    let pairing = involution_on_fiber(&curve, &fiber, &branch, &settings(0)).unwrap();
    assert_eq!(pairing.permutation.images(), &[1, 0]);
}
