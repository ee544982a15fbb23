use std::f64::consts::TAU;

use num_complex::Complex64;

use super::perm::Permutation;
use super::track::{match_roots, Fiber};
use super::PeriodCurve;
use crate::error::{Error, Result};

// Dormand–Prince 5(4) tableau
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const MAX_STEPS: usize = 200_000;

/// Continues a single root `v` of the fiber over `a = radius·e^{iθ₀}` once
/// around the circle by integrating `dv/dθ = i·a·dv/da` with adaptive
/// Dormand–Prince steps; no Newton correction is applied. `tol` bounds
/// the local error per step.
pub fn continue_root_on_circle(
    curve: &PeriodCurve,
    radius: f64,
    start_angle: f64,
    v: Complex64,
    tol: f64,
) -> Result<Complex64> {
    let eq = curve.equation();
    let rhs = |theta: f64, v: Complex64| {
        let a = Complex64::from_polar(radius, theta);
        eq.tangent(a, v) * a * Complex64::i()
    };
    let end = start_angle + TAU;
    let mut theta = start_angle;
    let mut v = v;
    let mut h: f64 = 1e-3;
    for _ in 0..MAX_STEPS {
        if theta >= end {
            return Ok(v);
        }
        h = h.min(end - theta);
        let mut k = [Complex64::new(0.0, 0.0); 7];
        for s in 0..7 {
            let inc: Complex64 = (0..s).map(|j| k[j] * A[s][j]).sum();
            k[s] = rhs(theta + C[s] * h, v + inc * h);
        }
        let high: Complex64 = (0..7).map(|j| k[j] * B5[j]).sum();
        let low: Complex64 = (0..7).map(|j| k[j] * B4[j]).sum();
        let err = ((high - low) * h).norm();
        if !err.is_finite() {
            return Err(Error::TrackingStall {
                at: Complex64::from_polar(radius, theta),
                step: h,
            });
        }
        if err <= tol {
            v += high * h;
            theta += h;
        }
        let factor = if err == 0.0 { 2.0 } else { 0.9 * (tol / err).powf(0.2) };
        h *= factor.clamp(0.2, 2.0);
        if h < 1e-14 {
            return Err(Error::TrackingStall {
                at: Complex64::from_polar(radius, theta),
                step: h,
            });
        }
    }
    Err(Error::TrackingStall {
        at: Complex64::from_polar(radius, theta),
        step: h,
    })
}

/// The permutation of `fiber` (over `a = radius`) induced by one
/// counterclockwise turn on `|a| = radius`, each root continued alone.
pub fn circle_permutation_by_ode(curve: &PeriodCurve, fiber: &Fiber, relative_tol: f64) -> Result<Permutation> {
    let radius = fiber.base.norm();
    let start = fiber.base.arg();
    let tol = relative_tol * fiber.min_separation.min(radius);
    let ends = fiber
        .roots
        .iter()
        .map(|&v| continue_root_on_circle(curve, radius, start, v, tol))
        .collect::<Result<Vec<_>>>()?;
    match_roots(&ends, &fiber.roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monodromy::fiber_at;

    #[test]
    fn large_circle_fixes_period_two_roots() {
        let curve = PeriodCurve::new(2, 8).unwrap();
        let fiber = fiber_at(&curve, Complex64::new(3.0, 0.0), 1e-8).unwrap();
        let perm = circle_permutation_by_ode(&curve, &fiber, 1e-6).unwrap();
        assert!(perm.is_identity());
    }

    #[test]
    fn agrees_with_tracker_on_a_circle_through_the_branch_locus() {
        let curve = PeriodCurve::new(3, 8).unwrap();
        let mut moduli: Vec<f64> = curve
            .branch_points(1e-8)
            .unwrap()
            .iter()
            .map(|b| b.value.norm())
            .collect();
        moduli.sort_by(f64::total_cmp);
        let (k, _) = moduli
            .windows(2)
            .enumerate()
            .max_by(|x, y| (x.1[1] - x.1[0]).total_cmp(&(y.1[1] - y.1[0])))
            .unwrap();
        let radius = 0.5 * (moduli[k] + moduli[k + 1]);
        let base = Complex64::from_polar(radius, 0.3);
        let fiber = fiber_at(&curve, base, 1e-8).unwrap();
        let by_ode = circle_permutation_by_ode(&curve, &fiber, 1e-6).unwrap();
        let path = crate::monodromy::circle_path(Complex64::new(0.0, 0.0), radius, 0.3, 64);
        let tracked =
            crate::monodromy::track_path(&curve, &path, &fiber.roots, &Default::default()).unwrap();
        let by_tracker = match_roots(tracked.end(), &fiber.roots).unwrap();
        assert_eq!(by_ode, by_tracker);
    }
}
