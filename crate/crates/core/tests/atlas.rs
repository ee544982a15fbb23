use critorbit::atlas::{build_atlas, AtlasReport, AtlasSettings};
use critorbit::exactpoly::DEFAULT_DEGREE_BUDGET;
use critorbit::kneading::KneadingWord;
use critorbit::monodromy::PeriodCurve;

fn atlas(n: u32) -> AtlasReport {
    let curve = PeriodCurve::new(n, DEFAULT_DEGREE_BUDGET).unwrap();
    let settings = AtlasSettings::default();
    let branch = curve.branch_points(settings.monodromy.merge_tol).unwrap();
    build_atlas(&curve, &branch, None, &settings).unwrap()
}

fn check_invariants(report: &AtlasReport) {
    let n = report.n as usize;
    assert!(report.cross_check.agrees, "{:?}", report.cross_check);
    assert!(report.counts_consistent);
    assert!(report.distinguished_unique);
    assert_eq!(report.region_count, report.infinity_cycle_type.len());
    assert_eq!(report.infinity_cycle_type.iter().sum::<usize>(), report.degree_v);
    for region in &report.regions {
        assert!(region.escaping && region.constant && region.refinement_stable, "region {}", region.region_id);
        assert!(region.samples_checked >= 8);
        let word = region.kneading.as_ref().unwrap();
        assert_eq!(word.len(), n);
        assert_eq!(word.symbol(n), 0);
        let path = region.flip_path.as_ref().unwrap();
        assert!(region.flip_path_valid);
        assert!(word.apply_flips(path).unwrap().is_distinguished());
        assert_eq!(path.len(), word.symbols()[..n - 1].iter().filter(|&&s| s == 0).count());
        for s in &region.samples {
            assert_eq!(s.kneading.as_ref(), Some(word));
            assert!(s.refinement_agrees);
        }
    }
    let distinguished = KneadingWord::distinguished(n).unwrap().to_string();
    assert_eq!(report.realized_words.get(&distinguished), Some(&1));
    assert!(report.max_residual < 1e-8);
}

#[test]
fn period_two_atlas() {
    let report = atlas(2);
    check_invariants(&report);
    assert_eq!(report.region_count, 2);
    assert_eq!(report.realized_words.keys().cloned().collect::<Vec<_>>(), vec!["00", "10"]);
}

#[test]
fn period_three_atlas_round_trips_through_json() {
    let report = atlas(3);
    check_invariants(&report);
    assert_eq!(report.sample_count(), 8 * report.degree_v);
    let text = serde_json::to_string(&report).unwrap();
    let back: AtlasReport = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string(&back).unwrap(), text);
}
