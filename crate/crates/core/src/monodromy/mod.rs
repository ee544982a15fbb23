//! Monodromy of the projection `(a, v) ↦ a` on the period-`n` curves:
//! branch points, fiber tracking, loop generators, the loop at infinity
//! and the involution `(a, v) ↦ (-a, -v)` on fibers.

mod equation;
mod ode;
mod perm;
mod track;

use std::f64::consts::{FRAC_PI_2, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use equation::PeriodEquation;
pub use ode::{circle_permutation_by_ode, continue_root_on_circle};
pub use perm::{orbits, Permutation};
pub use track::{
    circle_path, fiber_at, match_roots, min_separation, track_fiber, track_path, Fiber, TrackSettings,
    TrackStats, TrackedPath,
};

use crate::error::{Error, Result};
use crate::exactpoly::{build_phin, discriminant_v, BivariatePolynomial, NumericCurve, UnivariatePolynomial};
use crate::roots::{aberth, cluster_points, newton_polish, relative_residual, sort_lexicographic, AberthSettings, ScaledPolynomial};

/// `Φ_n` with its floating-point evaluator.
#[derive(Clone, Debug)]
pub struct PeriodCurve {
    n: u32,
    exact: Arc<BivariatePolynomial>,
    numeric: NumericCurve,
    equation: PeriodEquation,
}

impl PeriodCurve {
    pub fn new(n: u32, budget: u32) -> Result<Self> {
        let exact = build_phin(n, budget)?;
        let numeric = NumericCurve::new(&exact);
        Ok(Self { n, exact, numeric, equation: PeriodEquation::new(n) })
    }

    pub fn equation(&self) -> &PeriodEquation {
        &self.equation
    }

    pub fn period(&self) -> u32 {
        self.n
    }

    pub fn exact(&self) -> &BivariatePolynomial {
        &self.exact
    }

    pub fn numeric(&self) -> &NumericCurve {
        &self.numeric
    }

    pub fn degree_v(&self) -> usize {
        self.numeric.degree_v()
    }

    pub fn discriminant(&self) -> Result<UnivariatePolynomial> {
        discriminant_v(&self.exact)
    }

    /// Roots of the discriminant in `v`, merged within `merge_tol` and
    /// sorted lexicographically.
    pub fn branch_points(&self, merge_tol: f64) -> Result<Vec<BranchPoint>> {
        if self.degree_v() < 2 {
            return Ok(Vec::new());
        }
        let disc = self.discriminant()?;
        let sqf = disc.squarefree_part();
        let degree = sqf.degree().unwrap_or(0);
        if degree == 0 {
            return Ok(Vec::new());
        }
        let scaled = ScaledPolynomial::from_bigint(sqf.coeffs());
        let top = scaled.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let unit: Vec<Complex64> = scaled.coeffs.iter().map(|c| c / top).collect();
        let roots: Vec<Complex64> = aberth(&unit, AberthSettings::default())?
            .into_iter()
            .map(|z| newton_polish(&unit, z, 8))
            .collect();
        let full = ScaledPolynomial::from_bigint(disc.coeffs());
        let mut out: Vec<BranchPoint> = cluster_points(&roots, merge_tol)
            .into_iter()
            .map(|(value, merged)| BranchPoint {
                value,
                residual: relative_residual(&full.coeffs, value),
                merged,
            })
            .collect();
        if let Some(bad) = out.iter().find(|b| !(b.residual < 1e-6)) {
            return Err(Error::Internal(format!(
                "discriminant residual {:e} at branch point {}",
                bad.residual, bad.value
            )));
        }
        out.sort_by(|x, y| {
            x.value
                .re
                .total_cmp(&y.value.re)
                .then(x.value.im.total_cmp(&y.value.im))
        });
        Ok(out)
    }
}

/// A critical value of the projection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub value: Complex64,
    /// Backward-error residual of the discriminant at `value`.
    pub residual: f64,
    /// Number of computed roots merged into this point.
    pub merged: usize,
}

pub fn branch_points(n: u32, budget: u32) -> Result<Vec<BranchPoint>> {
    PeriodCurve::new(n, budget)?.branch_points(MonodromySettings::default().merge_tol)
}

/// Largest period for which the command line runs monodromy by default.
pub const DEFAULT_MONODROMY_BUDGET: u32 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonodromySettings {
    pub seed: u64,
    pub track: TrackSettings,
    pub circle_vertices: usize,
    /// Loop radius as a fraction of the nearest-neighbour distance.
    pub radius_fraction: f64,
    pub merge_tol: f64,
    /// Base modulus as a multiple of the largest branch-point modulus.
    pub base_radius_factor: f64,
    pub max_base_draws: usize,
}

impl Default for MonodromySettings {
    fn default() -> Self {
        Self {
            seed: 0,
            track: TrackSettings::default(),
            circle_vertices: 64,
            radius_fraction: 0.25,
            merge_tol: 1e-8,
            base_radius_factor: 2.0,
            max_base_draws: 256,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopGenerator {
    pub branch_point: Complex64,
    pub radius: f64,
    pub permutation: Permutation,
    pub cycles: String,
    pub stats: TrackStats,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonodromyResult {
    pub n: u32,
    pub degree_v: usize,
    pub seed: u64,
    pub settings: MonodromySettings,
    pub base: Complex64,
    pub base_fiber: Vec<Complex64>,
    pub base_clearance: f64,
    pub branch_points: Vec<BranchPoint>,
    /// One loop per branch point, in product order.
    pub generators: Vec<LoopGenerator>,
    /// Counterclockwise loop on `|a| = |base|` through the base.
    pub infinity: Permutation,
    pub infinity_cycles: String,
    pub infinity_cycle_type: Vec<usize>,
    pub product_cycle_type: Vec<usize>,
    pub product_relation_holds: bool,
    pub orbit_count: usize,
    pub orbit_sizes: Vec<usize>,
    pub orbits: Vec<Vec<usize>>,
    pub max_residual: f64,
}

fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + d * t)).norm()
}

fn polyline_clearance(path: &[Complex64], points: &[Complex64], radii: &[f64], skip: Option<usize>) -> f64 {
    let mut best = f64::INFINITY;
    for (j, (&p, &r)) in points.iter().zip(radii).enumerate() {
        if Some(j) == skip {
            continue;
        }
        for w in path.windows(2) {
            best = best.min(segment_distance(p, w[0], w[1]) / r);
        }
    }
    best
}

/// Loop radii: a fixed fraction of each point's nearest-neighbour distance.
pub fn loop_radii(points: &[Complex64], fraction: f64) -> Vec<f64> {
    points
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let nn = points
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &q)| (p - q).norm())
                .fold(f64::INFINITY, f64::min);
            let nn = if nn.is_finite() { nn } else { p.norm().max(1.0) };
            fraction * nn
        })
        .collect()
}

fn entry_point(base: Complex64, center: Complex64, radius: f64) -> Complex64 {
    let u = base - center;
    center + u / u.norm() * radius
}

/// Base point and its clearance: the smallest ratio, over the straight
/// legs to each loop, of the distance to any other branch point over that
/// point's loop radius.
fn choose_base(points: &[Complex64], radii: &[f64], settings: &MonodromySettings) -> Result<(Complex64, f64)> {
    let modulus = points.iter().map(|p| p.norm()).fold(0.0, f64::max);
    let rho = settings.base_radius_factor * if modulus > 0.0 { modulus } else { 0.5 };
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut best: Option<(Complex64, f64)> = None;
    for _ in 0..settings.max_base_draws {
        let theta: f64 = rng.gen_range(0.0..TAU);
        // stay off the real and imaginary axes, where the symmetries act
        let off_axis = (theta / FRAC_PI_2 - (theta / FRAC_PI_2).round()).abs() * FRAC_PI_2;
        if off_axis < 0.05 {
            continue;
        }
        let base = Complex64::from_polar(rho, theta);
        let clearance = points
            .iter()
            .zip(radii)
            .enumerate()
            .map(|(i, (&p, &r))| polyline_clearance(&[base, entry_point(base, p, r)], points, radii, Some(i)))
            .fold(f64::INFINITY, f64::min);
        if clearance >= 1.0 {
            return Ok((base, clearance));
        }
        if best.is_none_or(|(_, c)| clearance > c) {
            best = Some((base, clearance));
        }
    }
    match best {
        Some((base, c)) if c > 0.05 => Ok((base, c)),
        _ => Err(Error::Domain(
            "no base point with clear straight legs to every branch point".into(),
        )),
    }
}

fn loop_path(base: Complex64, center: Complex64, radius: f64, vertices: usize, reverse: bool) -> Vec<Complex64> {
    let entry = entry_point(base, center, radius);
    let start = (entry - center).arg();
    let mut circle = circle_path(center, radius, start, vertices);
    if reverse {
        circle.reverse();
    }
    let mut path = vec![base];
    path.extend(circle);
    path.push(base);
    path
}

/// Permutation of the base fiber from one loop around `center`.
pub fn loop_permutation(
    curve: &PeriodCurve,
    base_fiber: &Fiber,
    center: Complex64,
    radius: f64,
    settings: &MonodromySettings,
    reverse: bool,
) -> Result<(Permutation, TrackStats)> {
    let path = loop_path(base_fiber.base, center, radius, settings.circle_vertices, reverse);
    let tracked = track_path(curve, &path, &base_fiber.roots, &settings.track)?;
    Ok((match_roots(tracked.end(), &base_fiber.roots)?, tracked.stats))
}

/// Signed angle of `p - base` from the direction `-base`.
fn angle_from_base(base: Complex64, p: Complex64) -> f64 {
    ((p - base) / (-base)).arg()
}

pub fn connected_components(curve: &PeriodCurve, settings: &MonodromySettings) -> Result<MonodromyResult> {
    let branch = curve.branch_points(settings.merge_tol)?;
    let points: Vec<Complex64> = branch.iter().map(|b| b.value).collect();
    let radii = loop_radii(&points, settings.radius_fraction);
    let (base, base_clearance) = choose_base(&points, &radii, settings)?;
    let base_fiber = fiber_at(curve, base, settings.track.residual_tol)?;
    let d = base_fiber.degree();

    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| angle_from_base(base, points[i]).total_cmp(&angle_from_base(base, points[j])));

    let generators = order
        .par_iter()
        .map(|&i| {
            loop_permutation(curve, &base_fiber, points[i], radii[i], settings, false)
                .map(|(permutation, stats)| LoopGenerator {
                    branch_point: points[i],
                    radius: radii[i],
                    cycles: permutation.to_string(),
                    permutation,
                    stats,
                })
                .map_err(|e| Error::Loop { index: i, source: Box::new(e) })
        })
        .collect::<Result<Vec<_>>>()?;

    let big = circle_path(Complex64::new(0.0, 0.0), base.norm(), base.arg(), settings.circle_vertices);
    let tracked = track_path(curve, &big, &base_fiber.roots, &settings.track)?;
    let infinity = match_roots(tracked.end(), &base_fiber.roots)?;

    let product = generators
        .iter()
        .fold(Permutation::identity(d), |acc, g| acc.then(&g.permutation));
    let perms: Vec<Permutation> = generators.iter().map(|g| g.permutation.clone()).collect();
    let orbit_list = orbits(d, &perms);
    let max_residual = generators
        .iter()
        .map(|g| g.stats.max_residual)
        .fold(tracked.stats.max_residual, f64::max);

    Ok(MonodromyResult {
        n: curve.period(),
        degree_v: d,
        seed: settings.seed,
        settings: *settings,
        base,
        base_fiber: base_fiber.roots.clone(),
        base_clearance,
        branch_points: branch,
        product_cycle_type: product.cycle_type(),
        infinity_cycle_type: infinity.cycle_type(),
        product_relation_holds: product.cycle_type() == infinity.cycle_type(),
        infinity_cycles: infinity.to_string(),
        infinity,
        generators,
        orbit_count: orbit_list.len(),
        orbit_sizes: orbit_list.iter().map(Vec::len).collect(),
        orbits: orbit_list,
        max_residual,
    })
}

/// One counterclockwise turn on `|a| = radius` from `a = radius`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfinityLoop {
    pub radius: f64,
    pub fiber: Fiber,
    pub permutation: Permutation,
    pub cycles: String,
    pub cycle_type: Vec<usize>,
    /// Roots in fiber-label order at every polygon vertex.
    #[serde(skip)]
    pub vertex_roots: Vec<Vec<Complex64>>,
    pub stats: TrackStats,
}

fn infinity_loop(curve: &PeriodCurve, radius: f64, settings: &MonodromySettings) -> Result<InfinityLoop> {
    let fiber = fiber_at(curve, Complex64::new(radius, 0.0), settings.track.residual_tol)?;
    let path = circle_path(Complex64::new(0.0, 0.0), radius, 0.0, settings.circle_vertices);
    let tracked = track_path(curve, &path, &fiber.roots, &settings.track)?;
    let permutation = match_roots(tracked.end(), &fiber.roots)?;
    Ok(InfinityLoop {
        radius,
        cycles: permutation.to_string(),
        cycle_type: permutation.cycle_type(),
        fiber,
        permutation,
        vertex_roots: tracked.vertex_roots,
        stats: tracked.stats,
    })
}

/// The loop at infinity on `|a| = radius`, re-run at `2·radius` to confirm
/// the cycle type.
pub fn monodromy_at_infinity(
    curve: &PeriodCurve,
    branch: &[BranchPoint],
    radius: f64,
    settings: &MonodromySettings,
) -> Result<InfinityLoop> {
    let modulus = branch.iter().map(|b| b.value.norm()).fold(0.0, f64::max);
    if !(radius > 2.0 * modulus) {
        return Err(Error::Domain(format!(
            "radius {radius} must exceed twice the largest branch-point modulus {modulus}"
        )));
    }
    let first = infinity_loop(curve, radius, settings)?;
    let second = infinity_loop(curve, 2.0 * radius, settings)?;
    if first.cycle_type != second.cycle_type {
        return Err(Error::UnstableAtInfinity {
            first: first.cycle_type,
            second: second.cycle_type,
        });
    }
    Ok(first)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvolutionPairing {
    pub permutation: Permutation,
    pub fixed_points: Vec<usize>,
    /// Largest residual of `Φ_n(-a₀, -v_i)` over the fiber.
    pub symmetry_residual: f64,
    pub stats: TrackStats,
}

/// Centrally symmetric path from `a0` through 0 to `-a0`, bent sideways
/// when the straight line passes close to a branch point.
fn symmetric_path(a0: Complex64, points: &[Complex64], radii: &[f64]) -> Vec<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let mut best: Option<(Vec<Complex64>, f64)> = None;
    for bend in [0.0, 0.15, -0.15, 0.3, -0.3, 0.5, -0.5] {
        let mid = a0 * Complex64::new(0.5, bend);
        let path = vec![a0, mid, zero, -mid, -a0];
        let c = polyline_clearance(&path, points, radii, None);
        if c >= 2.0 {
            return path;
        }
        if best.as_ref().is_none_or(|(_, b)| c > *b) {
            best = Some((path, c));
        }
    }
    best.expect("at least one candidate").0
}

/// The deck pairing: each root over `a₀` is continued to `-a₀` along a
/// centrally symmetric path and negated, which lands back in the fiber
/// over `a₀`. Symmetry of the path makes the pairing an involution.
pub fn involution_on_fiber(
    curve: &PeriodCurve,
    fiber: &Fiber,
    branch: &[BranchPoint],
    settings: &MonodromySettings,
) -> Result<InvolutionPairing> {
    let points: Vec<Complex64> = branch.iter().map(|b| b.value).collect();
    let radii = loop_radii(&points, settings.radius_fraction);
    if points.iter().any(|p| p.norm() < 1e-9) {
        return Err(Error::Domain("a = 0 is a branch point; no symmetric path exists".into()));
    }
    let path = symmetric_path(fiber.base, &points, &radii);
    let tracked = track_path(curve, &path, &fiber.roots, &settings.track)?;
    let negated: Vec<Complex64> = tracked.end().iter().map(|v| -v).collect();
    let permutation = match_roots(&negated, &fiber.roots)?;
    let symmetry_residual = fiber
        .roots
        .iter()
        .map(|&v| curve.numeric().relative_residual(-fiber.base, -v))
        .fold(0.0, f64::max);
    Ok(InvolutionPairing {
        fixed_points: permutation.fixed_points(),
        permutation,
        symmetry_residual,
        stats: tracked.stats,
    })
}

/// `true` when `angle` is within `tol` of a multiple of `π/2`.
pub fn near_symmetry_axes(a: Complex64, tol: f64) -> bool {
    let t = a.arg() / FRAC_PI_2;
    (t - t.round()).abs() * FRAC_PI_2 < tol || a.norm() == 0.0
}

/// Sorted roots over `a`, for callers that only need the values.
pub fn fiber_values(curve: &PeriodCurve, a: Complex64) -> Result<Vec<Complex64>> {
    let mut roots = fiber_at(curve, a, TrackSettings::default().residual_tol)?.roots;
    sort_lexicographic(&mut roots);
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic_roots(a: Complex64) -> [Complex64; 2] {
        let s = (a * a * 9.0 - 4.0).sqrt();
        [(-a + s) / 2.0, (-a - s) / 2.0]
    }

    #[test]
    fn period_two_branch_points() {
        let bp = branch_points(2, 8).unwrap();
        assert_eq!(bp.len(), 2);
        assert!((bp[0].value - Complex64::new(-2.0 / 3.0, 0.0)).norm() < 1e-10);
        assert!((bp[1].value - Complex64::new(2.0 / 3.0, 0.0)).norm() < 1e-10);
        assert!(branch_points(1, 8).unwrap().is_empty());
    }

    #[test]
    fn period_two_fiber_matches_quadratic_formula() {
        let curve = PeriodCurve::new(2, 8).unwrap();
        let a = Complex64::new(0.3, 1.1);
        let fiber = fiber_at(&curve, a, 1e-8).unwrap();
        for r in quadratic_roots(a) {
            assert!(fiber.roots.iter().any(|v| (v - r).norm() < 1e-12));
        }
    }

    #[test]
    fn small_circle_swaps_the_period_two_roots() {
        let curve = PeriodCurve::new(2, 8).unwrap();
        let s = MonodromySettings::default();
        let a0 = Complex64::new(2.0 / 3.0 + 0.1, 0.05);
        let fiber = fiber_at(&curve, a0, 1e-8).unwrap();
        let center = Complex64::new(2.0 / 3.0, 0.0);
        let (perm, _) = loop_permutation(&curve, &fiber, center, 0.05, &s, false).unwrap();
        assert_eq!(perm.to_string(), "(0 1)");
        let constant = track_fiber(&curve, &[a0, a0], &fiber, &s.track).unwrap();
        assert!(constant.1.is_identity());
    }

    #[test]
    fn base_choice_is_seeded() {
        let pts = [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)];
        let radii = loop_radii(&pts, 0.25);
        let s = MonodromySettings { seed: 11, ..Default::default() };
        let (b1, _) = choose_base(&pts, &radii, &s).unwrap();
        let (b2, _) = choose_base(&pts, &radii, &s).unwrap();
        assert_eq!(b1, b2);
        assert!((b1.norm() - 2.0).abs() < 1e-12);
        assert!(!near_symmetry_axes(b1, 0.05));
    }

    #[test]
    fn segment_distance_cases() {
        let a = Complex64::new(0.0, 0.0);
        let b = Complex64::new(2.0, 0.0);
        assert!((segment_distance(Complex64::new(1.0, 1.0), a, b) - 1.0).abs() < 1e-15);
        assert!((segment_distance(Complex64::new(3.0, 0.0), a, b) - 1.0).abs() < 1e-15);
    }
}
