use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::perm::Permutation;
use super::PeriodCurve;
use crate::error::{Error, Result};
use crate::roots::{aberth, sort_lexicographic, AberthSettings};

/// The `v`-roots of the curve over one parameter value, in label order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fiber {
    pub base: Complex64,
    pub roots: Vec<Complex64>,
    pub min_separation: f64,
}

impl Fiber {
    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    /// Largest backward-error residual over the roots.
    pub fn max_residual(&self, curve: &PeriodCurve) -> f64 {
        self.roots
            .iter()
            .map(|&v| curve.numeric().relative_residual(self.base, v))
            .fold(0.0, f64::max)
    }
}

pub fn min_separation(roots: &[Complex64]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            best = best.min((roots[i] - roots[j]).norm());
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackSettings {
    /// Every corrected root must lie within this fraction of the minimum
    /// separation of its predicted position.
    pub separation_fraction: f64,
    pub max_newton: usize,
    pub residual_tol: f64,
    /// Smallest step, relative to `max(1, |a|)`.
    pub min_step: f64,
}

impl Default for TrackSettings {
    fn default() -> Self {
        Self {
            separation_fraction: 1.0 / 3.0,
            max_newton: 8,
            residual_tol: 1e-8,
            min_step: 1e-12,
        }
    }
}

/// Roots over `a`, sorted lexicographically. Starting values come from
/// the expanded coefficients and are refined by Aberth steps on the orbit
/// form of the equation.
pub fn fiber_at(curve: &PeriodCurve, a: Complex64, residual_tol: f64) -> Result<Fiber> {
    let (q, s) = curve.numeric().scaled_coefficients_at(a);
    let mut roots: Vec<Complex64> = aberth(&q, AberthSettings::default())?
        .into_iter()
        .map(|w| w * s)
        .collect();
    refine_roots(curve, a, &mut roots)?;
    sort_lexicographic(&mut roots);
    let min_separation = min_separation(&roots);
    if roots.len() > 1 && !(min_separation > 0.0 && min_separation.is_finite()) {
        return Err(Error::Collision { at: a });
    }
    let fiber = Fiber { base: a, roots, min_separation };
    if fiber.max_residual(curve) > residual_tol {
        return Err(Error::RootFinding { degree: fiber.degree() });
    }
    Ok(fiber)
}

fn refine_roots(curve: &PeriodCurve, a: Complex64, z: &mut [Complex64]) -> Result<()> {
    let d = z.len();
    for _ in 0..200 {
        let mut worst = 0.0f64;
        for i in 0..d {
            let ratio = curve.equation().newton_ratio(a, z[i]);
            let repulsion: Complex64 = (0..d).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let w = ratio / (1.0 - ratio * repulsion);
            if !w.is_finite() {
                continue;
            }
            z[i] -= w;
            worst = worst.max(w.norm() / z[i].norm().max(a.norm()).max(1.0));
        }
        if worst < 1e-15 {
            return Ok(());
        }
    }
    // the last corrections sit at rounding level; accept them
    if z.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::RootFinding { degree: d })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrackStats {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub max_residual: f64,
}

impl TrackStats {
    pub fn merge(&mut self, other: &TrackStats) {
        self.accepted_steps += other.accepted_steps;
        self.rejected_steps += other.rejected_steps;
        self.max_residual = self.max_residual.max(other.max_residual);
    }
}

/// Roots in start-label order at every vertex of a tracked polyline.
#[derive(Clone, Debug)]
pub struct TrackedPath {
    pub vertex_roots: Vec<Vec<Complex64>>,
    pub stats: TrackStats,
}

impl TrackedPath {
    pub fn end(&self) -> &[Complex64] {
        self.vertex_roots.last().expect("a tracked path has a start vertex")
    }
}

/// Continues `start` (roots over `path[0]`) along the polyline.
pub fn track_path(
    curve: &PeriodCurve,
    path: &[Complex64],
    start: &[Complex64],
    settings: &TrackSettings,
) -> Result<TrackedPath> {
    let mut stats = TrackStats::default();
    let mut vertex_roots = vec![start.to_vec()];
    let Some(&a0) = path.first() else {
        return Ok(TrackedPath { vertex_roots, stats });
    };
    let mut state = TrackState {
        a: a0,
        roots: start.to_vec(),
        previous: None,
        step: f64::INFINITY,
    };
    for w in path.windows(2) {
        track_segment(curve, w[0], w[1], &mut state, settings, &mut stats)?;
        vertex_roots.push(state.roots.clone());
    }
    Ok(TrackedPath { vertex_roots, stats })
}

fn track_segment(
    curve: &PeriodCurve,
    from: Complex64,
    to: Complex64,
    state: &mut TrackState,
    settings: &TrackSettings,
    stats: &mut TrackStats,
) -> Result<()> {
    let len = (to - from).norm();
    if len == 0.0 {
        return Ok(());
    }
    let mut t = 0.0;
    state.step = state.step.min(len);
    while t < 1.0 {
        let mut dt = (state.step / len).min(1.0 - t);
        if 1.0 - t - dt < 1e-12 {
            dt = 1.0 - t;
        }
        let a = if t + dt >= 1.0 { to } else { from + (to - from) * (t + dt) };
        let predicted = state.predict(a);
        let sep = min_separation(&state.roots).min(min_separation(&predicted));
        match correct(curve, a, &predicted, sep * settings.separation_fraction, settings) {
            Some((corrected, res)) => {
                state.advance(a, corrected);
                t += dt;
                stats.accepted_steps += 1;
                stats.max_residual = stats.max_residual.max(res);
                state.step *= 1.5;
            }
            None => {
                stats.rejected_steps += 1;
                state.step *= 0.5;
                let here = state.a;
                if state.step < settings.min_step * here.norm().max(1.0) {
                    let scale = state.roots.iter().map(|v| v.norm()).fold(1.0, f64::max);
                    return Err(if sep < 1e-10 * scale {
                        Error::Collision { at: here }
                    } else {
                        Error::TrackingStall { at: here, step: state.step }
                    });
                }
            }
        }
    }
    Ok(())
}

/// Current roots plus the previous accepted point, for the secant
/// predictor `v + (a' - a)·(v - v_prev)/(a - a_prev)`; `v(a)` is
/// holomorphic, so the complex difference quotient approximates `dv/da`
/// in every direction.
struct TrackState {
    a: Complex64,
    roots: Vec<Complex64>,
    previous: Option<(Complex64, Vec<Complex64>)>,
    step: f64,
}

impl TrackState {
    fn predict(&self, a: Complex64) -> Vec<Complex64> {
        match &self.previous {
            Some((ap, vp)) if *ap != self.a => {
                let ratio = (a - self.a) / (self.a - ap);
                self.roots
                    .iter()
                    .zip(vp)
                    .map(|(v, w)| v + (v - w) * ratio)
                    .collect()
            }
            _ => self.roots.clone(),
        }
    }

    fn advance(&mut self, a: Complex64, roots: Vec<Complex64>) {
        if a == self.a {
            self.roots = roots;
            return;
        }
        let old = std::mem::replace(&mut self.roots, roots);
        self.previous = Some((self.a, old));
        self.a = a;
    }
}

/// Newton correction of every root at `a` from its predicted position,
/// using the orbit form of the equation. Fails unless each converges
/// within the iteration cap, lands within `max_move` of its prediction,
/// and meets the residual tolerance of the expanded polynomial.
fn correct(
    curve: &PeriodCurve,
    a: Complex64,
    predicted: &[Complex64],
    max_move: f64,
    settings: &TrackSettings,
) -> Option<(Vec<Complex64>, f64)> {
    let mut out = Vec::with_capacity(predicted.len());
    let noise_move = 1e-3 * max_move;
    for &v in predicted {
        let mut w = v;
        let mut converged = false;
        let mut last = f64::INFINITY;
        for _ in 0..settings.max_newton {
            let delta = curve.equation().newton_ratio(a, w);
            if !delta.is_finite() {
                return None;
            }
            w -= delta;
            let size = delta.norm();
            // stagnation at rounding level counts as convergence
            if size <= 1e-14 * w.norm().max(a.norm()).max(1.0) || (size > 0.5 * last && size < noise_move) {
                converged = true;
                break;
            }
            last = size;
        }
        if !converged || !((w - v).norm() < max_move) {
            return None;
        }
        out.push(w);
    }
    let (q, s) = curve.numeric().scaled_coefficients_at(a);
    let worst = out
        .iter()
        .map(|&v| crate::roots::relative_residual(&q, v / s))
        .fold(0.0, f64::max);
    if !(worst < settings.residual_tol) {
        return None;
    }
    Some((out, worst))
}

/// The permutation `i ↦ j` with `tracked[i]` nearest `reference[j]`,
/// requiring each match to lie well inside the reference separation.
pub fn match_roots(tracked: &[Complex64], reference: &[Complex64]) -> Result<Permutation> {
    if tracked.len() != reference.len() {
        return Err(Error::Internal("fibers of different sizes".into()));
    }
    let limit = if reference.len() > 1 {
        min_separation(reference) / 3.0
    } else {
        f64::INFINITY
    };
    let images = tracked
        .iter()
        .map(|&v| {
            let (j, d) = reference
                .iter()
                .enumerate()
                .map(|(j, &r)| (j, (r - v).norm()))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .expect("nonempty fiber");
            if d < limit {
                Ok(j)
            } else {
                Err(Error::Internal(format!(
                    "tracked root {v} is {d:e} from the nearest reference root"
                )))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Permutation::new(images)
        .map_err(|_| Error::Internal("tracked roots do not match the reference fiber bijectively".into()))
}

/// Tracks `fiber` along `path`; returns the end fiber (sorted) and the
/// permutation from start labels to end-fiber positions.
pub fn track_fiber(
    curve: &PeriodCurve,
    path: &[Complex64],
    fiber: &Fiber,
    settings: &TrackSettings,
) -> Result<(Fiber, Permutation)> {
    let first = *path.first().ok_or_else(|| Error::Domain("empty path".into()))?;
    if (first - fiber.base).norm() > 1e-12 * fiber.base.norm().max(1.0) {
        return Err(Error::Domain("path does not start at the fiber base".into()));
    }
    let tracked = track_path(curve, path, &fiber.roots, settings)?;
    let end_base = *path.last().unwrap();
    let mut sorted = tracked.end().to_vec();
    sort_lexicographic(&mut sorted);
    let end = Fiber {
        base: end_base,
        min_separation: min_separation(&sorted),
        roots: sorted,
    };
    let perm = match_roots(tracked.end(), &end.roots)?;
    Ok((end, perm))
}

/// Closed polygon with `vertices` sides on the circle `|a - center| = r`,
/// counterclockwise from `center + r·e^{iθ}`.
pub fn circle_path(center: Complex64, radius: f64, start_angle: f64, vertices: usize) -> Vec<Complex64> {
    (0..=vertices)
        .map(|k| {
            let theta = start_angle + std::f64::consts::TAU * (k % vertices) as f64 / vertices as f64;
            center + Complex64::from_polar(radius, theta)
        })
        .collect()
}
