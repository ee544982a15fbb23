//! Escape regions at infinity: each cycle of the loop `|a| = R` is one
//! branch of the curve at infinity, sampled along its continuation and
//! labelled by the kneading word of its maps.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{classify_escape, exact_period, period_tolerance, CubicMap, EscapeClass, DEFAULT_BUDGET, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::kneading::{kneading_word_at, KneadingSettings, KneadingWord};
use crate::monodromy::{
    circle_permutation_by_ode, monodromy_at_infinity, BranchPoint, InfinityLoop, MonodromySettings, PeriodCurve,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtlasSettings {
    pub monodromy: MonodromySettings,
    pub kneading: KneadingSettings,
    /// Fixed circle radius; when absent, `radius_factor·(1 + max|β|)`.
    pub radius: Option<f64>,
    pub radius_factor: f64,
    /// Radius doublings allowed while some sample fails to escape.
    pub max_radius_doublings: u32,
    /// Samples per fiber label, evenly spaced in angle.
    pub samples_per_label: usize,
    pub escape_tol: f64,
    pub escape_budget: usize,
    /// Local error of the single-root cross-check, relative to the fiber
    /// separation.
    pub ode_tol: f64,
}

impl Default for AtlasSettings {
    fn default() -> Self {
        Self {
            monodromy: MonodromySettings::default(),
            kneading: KneadingSettings::default(),
            radius: None,
            radius_factor: 4.0,
            max_radius_doublings: 2,
            samples_per_label: 8,
            escape_tol: DEFAULT_TOL,
            escape_budget: DEFAULT_BUDGET,
            ode_tol: 1e-6,
        }
    }
}

/// One parameter `(a, v)` on the circle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub label: usize,
    pub vertex: usize,
    pub a: Complex64,
    pub v: Complex64,
    pub escape: EscapeClass,
    pub kneading: Option<KneadingWord>,
    pub resolution: Option<usize>,
    /// Same word at twice the resolution and at half the margin.
    pub refinement_agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EscapeRegionRecord {
    pub region_id: usize,
    /// Fiber labels over `a = R`, in cycle order.
    pub labels: Vec<usize>,
    pub cycle_length: usize,
    pub representative: (Complex64, Complex64),
    pub representative_verified: bool,
    pub escaping: bool,
    pub kneading: Option<KneadingWord>,
    pub unresolved: bool,
    pub constant: bool,
    pub refinement_stable: bool,
    pub samples_checked: usize,
    pub flip_path: Option<Vec<usize>>,
    pub flip_path_valid: bool,
    pub samples: Vec<Sample>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleCrossCheck {
    pub agrees: bool,
    pub cycle_type: Option<Vec<usize>>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtlasReport {
    pub n: u32,
    pub degree_v: usize,
    pub branch_point_count: usize,
    pub max_branch_modulus: f64,
    pub orbit_count: Option<usize>,
    pub radius: f64,
    pub radius_doublings: u32,
    pub infinity_cycles: String,
    pub infinity_cycle_type: Vec<usize>,
    pub cross_check: CycleCrossCheck,
    pub regions: Vec<EscapeRegionRecord>,
    pub region_count: usize,
    pub counts_consistent: bool,
    pub realized_words: BTreeMap<String, usize>,
    pub distinguished_regions: Vec<usize>,
    pub distinguished_unique: bool,
    pub seed: u64,
    pub settings: AtlasSettings,
    pub max_residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl AtlasReport {
    pub fn sample_count(&self) -> usize {
        self.regions.iter().map(|r| r.samples.len()).sum()
    }
}

fn kneading_with_refinement(
    map: &CubicMap,
    n: usize,
    settings: &KneadingSettings,
) -> Result<(Option<KneadingWord>, Option<usize>, bool)> {
    let (word, resolution) = match kneading_word_at(map, n, settings) {
        Ok(x) => x,
        Err(Error::KneadingUnresolved { .. }) => return Ok((None, None, false)),
        Err(e) => return Err(e),
    };
    let finer = KneadingSettings {
        initial_resolution: 2 * resolution,
        max_resolution: settings.max_resolution.max(2 * resolution),
        ..*settings
    };
    let thinner = KneadingSettings {
        margin_fraction: settings.margin_fraction / 2.0,
        ..*settings
    };
    let agrees = [finer, thinner]
        .iter()
        .all(|s| matches!(kneading_word_at(map, n, s), Ok((w, _)) if w == word));
    Ok((Some(word), Some(resolution), agrees))
}

fn sample_at(n: u32, label: usize, vertex: usize, a: Complex64, v: Complex64, settings: &AtlasSettings) -> Result<Sample> {
    let map = CubicMap::new(a, v);
    let escape = classify_escape(&map, settings.escape_tol, settings.escape_budget);
    let (kneading, resolution, refinement_agrees) = if escape == EscapeClass::EscapeLocus {
        kneading_with_refinement(&map, n as usize, &settings.kneading)?
    } else {
        (None, None, false)
    };
    Ok(Sample {
        label,
        vertex,
        a,
        v,
        escape,
        kneading,
        resolution,
        refinement_agrees,
    })
}

fn samples_on(curve: &PeriodCurve, inf: &InfinityLoop, settings: &AtlasSettings) -> Result<Vec<Sample>> {
    let vertices = settings.monodromy.circle_vertices;
    let per = settings.samples_per_label;
    if per == 0 || !vertices.is_multiple_of(per) {
        return Err(Error::Domain(format!(
            "samples per label ({per}) must divide the circle vertex count ({vertices})"
        )));
    }
    let stride = vertices / per;
    let path = crate::monodromy::circle_path(Complex64::new(0.0, 0.0), inf.radius, 0.0, vertices);
    let jobs: Vec<(usize, usize)> = (0..inf.fiber.degree())
        .flat_map(|label| (0..per).map(move |k| (label, k * stride)))
        .collect();
    jobs.par_iter()
        .map(|&(label, vertex)| {
            sample_at(
                curve.period(),
                label,
                vertex,
                path[vertex],
                inf.vertex_roots[vertex][label],
                settings,
            )
        })
        .collect()
}

fn region_record(region_id: usize, labels: Vec<usize>, inf: &InfinityLoop, samples: &[Sample], n: u32) -> EscapeRegionRecord {
    let mine: Vec<Sample> = samples.iter().filter(|s| labels.contains(&s.label)).cloned().collect();
    let escaping = mine.iter().all(|s| s.escape == EscapeClass::EscapeLocus);
    let unresolved = escaping && mine.iter().any(|s| s.kneading.is_none());
    let kneading = mine.first().and_then(|s| s.kneading.clone());
    let constant = !unresolved && escaping && mine.iter().all(|s| s.kneading == kneading);
    let refinement_stable = constant && mine.iter().all(|s| s.refinement_agrees);
    let representative = (inf.fiber.base, inf.fiber.roots[labels[0]]);
    let map = CubicMap::new(representative.0, representative.1);
    let representative_verified = matches!(exact_period(&map, n, period_tolerance(&map, n)), Ok(Some(p)) if p == n)
        && classify_escape(&map, DEFAULT_TOL, DEFAULT_BUDGET) == EscapeClass::EscapeLocus;
    let word = if constant { kneading } else { None };
    let flip_path = word.as_ref().map(KneadingWord::flip_path_to_distinguished);
    let flip_path_valid = match (&word, &flip_path) {
        (Some(w), Some(p)) => w.apply_flips(p).is_ok_and(|d| d.is_distinguished()),
        _ => false,
    };
    EscapeRegionRecord {
        region_id,
        cycle_length: labels.len(),
        labels,
        representative,
        representative_verified,
        escaping,
        kneading: word,
        unresolved,
        constant,
        refinement_stable,
        samples_checked: mine.len(),
        flip_path,
        flip_path_valid,
        samples: mine,
    }
}

/// The circle radius used when none is configured.
pub fn default_radius(branch: &[BranchPoint], factor: f64) -> f64 {
    factor * (1.0 + branch.iter().map(|b| b.value.norm()).fold(0.0, f64::max))
}

/// Builds the atlas of escape regions on `|a| = R`. `orbit_count` comes
/// from a separate components run, when available.
pub fn build_atlas(
    curve: &PeriodCurve,
    branch: &[BranchPoint],
    orbit_count: Option<usize>,
    settings: &AtlasSettings,
) -> Result<AtlasReport> {
    let n = curve.period();
    if n < 2 {
        return Err(Error::Domain("the atlas needs n >= 2".into()));
    }
    let base_radius = settings.radius.unwrap_or_else(|| default_radius(branch, settings.radius_factor));
    let mut chosen: Option<(InfinityLoop, Vec<Sample>, u32)> = None;
    for doublings in 0..=settings.max_radius_doublings {
        let radius = base_radius * f64::from(1u32 << doublings);
        let inf = match monodromy_at_infinity(curve, branch, radius, &settings.monodromy) {
            Ok(inf) => inf,
            Err(e) if chosen.is_none() => return Err(e),
            Err(_) => break,
        };
        let samples = samples_on(curve, &inf, settings)?;
        let done = samples.iter().all(|s| s.escape == EscapeClass::EscapeLocus);
        chosen = Some((inf, samples, doublings));
        if done || settings.radius.is_some() {
            break;
        }
    }
    let (inf, samples, radius_doublings) = chosen.expect("the first radius either succeeds or returns");

    let cross_check = match circle_permutation_by_ode(curve, &inf.fiber, settings.ode_tol) {
        Ok(p) => CycleCrossCheck {
            agrees: p == inf.permutation,
            cycle_type: Some(p.cycle_type()),
            error: None,
        },
        Err(e) => CycleCrossCheck {
            agrees: false,
            cycle_type: None,
            error: Some(e.to_string()),
        },
    };

    let regions: Vec<EscapeRegionRecord> = inf
        .permutation
        .cycles()
        .into_iter()
        .enumerate()
        .map(|(id, labels)| region_record(id, labels, &inf, &samples, n))
        .collect();
    let region_count = regions.iter().filter(|r| r.escaping).count();
    let mut realized_words = BTreeMap::new();
    for r in &regions {
        if let Some(w) = &r.kneading {
            *realized_words.entry(w.to_string()).or_insert(0) += 1;
        }
    }
    let distinguished_regions: Vec<usize> = regions
        .iter()
        .filter(|r| r.kneading.as_ref().is_some_and(KneadingWord::is_distinguished))
        .map(|r| r.region_id)
        .collect();
    Ok(AtlasReport {
        n,
        degree_v: curve.degree_v(),
        branch_point_count: branch.len(),
        max_branch_modulus: branch.iter().map(|b| b.value.norm()).fold(0.0, f64::max),
        orbit_count,
        radius: inf.radius,
        radius_doublings,
        infinity_cycles: inf.cycles.clone(),
        infinity_cycle_type: inf.cycle_type.clone(),
        cross_check,
        counts_consistent: region_count == regions.len(),
        region_count,
        distinguished_unique: distinguished_regions.len() == 1,
        distinguished_regions,
        realized_words,
        regions,
        seed: settings.monodromy.seed,
        settings: *settings,
        max_residual: inf.stats.max_residual.max(inf.fiber.max_residual(curve)),
        timings: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn period_two_atlas_has_one_distinguished_region() {
        let curve = PeriodCurve::new(2, 8).unwrap();
        let branch = curve.branch_points(1e-8).unwrap();
        let report = build_atlas(&curve, &branch, None, &AtlasSettings::default()).unwrap();
        assert_eq!(report.region_count, 2);
        assert!(report.counts_consistent);
        assert!(report.cross_check.agrees);
        assert!(report.distinguished_unique);
        let words: Vec<_> = report.realized_words.keys().cloned().collect();
        assert_eq!(words, ["00", "10"]);
        for r in &report.regions {
            assert!(r.constant && r.refinement_stable && r.flip_path_valid);
            assert!(r.samples_checked >= 8);
        }
    }
}
