use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use critorbit::dynamics::{green, CubicMap, DEFAULT_BUDGET};
use critorbit::exactpoly::DEFAULT_DEGREE_BUDGET;
use critorbit::kneading::{
    distinguished_word, flip_path_to_distinguished, kneading_word, locate_component, ComponentLabel,
    KneadingSettings, KneadingWord,
};
use critorbit::monodromy::{fiber_at, track_path, PeriodCurve, TrackSettings};

fn word() -> impl Strategy<Value = KneadingWord> {
    (2usize..12)
        .prop_flat_map(|n| prop::collection::vec(0u8..2, n - 1))
        .prop_map(|mut s| {
            s.push(0);
            KneadingWord::new(s).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn twist_flip_is_an_involution(w in word(), pick in 0usize..100) {
        let m = 1 + pick % (w.len() - 1);
        prop_assert_eq!(w.twist_flip(m).unwrap().twist_flip(m).unwrap(), w.clone());
        prop_assert!(w.twist_flip(0).is_err());
        prop_assert!(w.twist_flip(w.len()).is_err());
    }

    #[test]
    fn flip_path_reaches_distinguished_word_in_hamming_distance(w in word()) {
        let target = distinguished_word(w.len()).unwrap();
        let path = flip_path_to_distinguished(&w);
        let hamming = w.symbols().iter().zip(target.symbols()).filter(|(x, y)| x != y).count();
        prop_assert_eq!(path.len(), hamming);
        prop_assert_eq!(path.len(), w.symbols()[..w.len() - 1].iter().filter(|&&s| s == 0).count());
        prop_assert_eq!(w.apply_flips(&path).unwrap(), target);
    }

    #[test]
    fn words_round_trip_through_text(w in word()) {
        prop_assert_eq!(w.to_string().parse::<KneadingWord>().unwrap(), w);
    }
}

#[test]
fn words_must_end_in_zero() {
    assert!("0101".parse::<KneadingWord>().is_err());
    assert!("0".parse::<KneadingWord>().is_err());
    assert!("0120".parse::<KneadingWord>().is_err());
    assert_eq!(distinguished_word(4).unwrap().to_string(), "1110");
}

/// Short arcs on `|a| = R` inside the escape locus; the word of the
/// continued parameter must not change along an arc.
#[test]
fn kneading_word_is_constant_along_continuation_paths() {
    let settings = KneadingSettings::default();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for n in 2..=4u32 {
        let curve = PeriodCurve::new(n, DEFAULT_DEGREE_BUDGET).unwrap();
        let radius = 8.0;
        for _ in 0..20 {
            let theta = rng.gen_range(0.0..std::f64::consts::TAU);
            let path: Vec<Complex64> = (0..4).map(|k| Complex64::from_polar(radius, theta + 0.1 * k as f64)).collect();
            let fiber = fiber_at(&curve, path[0], 1e-8).unwrap();
            let label = rng.gen_range(0..fiber.roots.len());
            let tracked = track_path(&curve, &path, &fiber.roots, &TrackSettings::default()).unwrap();
            let words: Vec<KneadingWord> = path
                .iter()
                .zip(&tracked.vertex_roots)
                .map(|(&a, roots)| kneading_word(&CubicMap::new(a, roots[label]), n as usize, &settings).unwrap())
                .collect();
            assert!(words.windows(2).all(|w| w[0] == w[1]), "n = {n}, theta = {theta}: {words:?}");
        }
    }
}

#[test]
fn component_labels_never_contradict_across_resolutions() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let curve = PeriodCurve::new(2, DEFAULT_DEGREE_BUDGET).unwrap();
    let mut checked = 0;
    while checked < 40 {
        let a = Complex64::from_polar(rng.gen_range(3.0..8.0), rng.gen_range(0.0..std::f64::consts::TAU));
        let fiber = fiber_at(&curve, a, 1e-8).unwrap();
        let map = CubicMap::new(a, fiber.roots[rng.gen_range(0..2)]);
        let g = green(&map, map.free_critical(), 1e-12, DEFAULT_BUDGET).unwrap();
        let margin = 0.1 * g.value;
        let w = map.critical() * Complex64::from_polar(rng.gen_range(0.0..2.5), rng.gen_range(0.0..std::f64::consts::TAU));
        let coarse = locate_component(&map, w, margin, 128).unwrap();
        let fine = locate_component(&map, w, margin, 512).unwrap();
        let contradict = matches!(
            (coarse, fine),
            (ComponentLabel::D0, ComponentLabel::D1) | (ComponentLabel::D1, ComponentLabel::D0)
        );
        assert!(!contradict, "a = {a}, w = {w}: {coarse:?} vs {fine:?}");
        if !matches!(fine, ComponentLabel::Indeterminate) {
            checked += 1;
        }
    }
}

#[test]
fn anchors_land_in_their_own_components() {
    let curve = PeriodCurve::new(3, DEFAULT_DEGREE_BUDGET).unwrap();
    let a = Complex64::new(6.0, 1.0);
    for v in fiber_at(&curve, a, 1e-8).unwrap().roots {
        let map = CubicMap::new(a, v);
        let g = green(&map, map.free_critical(), 1e-12, DEFAULT_BUDGET).unwrap();
        assert_eq!(locate_component(&map, map.critical(), 0.1 * g.value, 512).unwrap(), ComponentLabel::D0);
        assert_eq!(locate_component(&map, map.cocritical(), 0.1 * g.value, 512).unwrap(), ComponentLabel::D1);
    }
}
