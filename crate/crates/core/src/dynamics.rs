//! Iteration of a single cubic `P(z) = z^3 - 3a^2 z + 2a^3 + v`, its
//! Green's function and Böttcher coordinate near infinity, escape
//! classification of the free critical point `-a`, and period detection
//! for the marked critical point `+a`.
//!
//! Beyond the escape radius the orbit is carried as `(log|z|, z/|z|)` so
//! that arbitrarily deep iterates never overflow. Error bounds are forward
//! estimates: rigorous modulo floating point, not interval arithmetic.

use std::f64::consts::LN_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_BUDGET: usize = 10_000;
pub const DEFAULT_TOL: f64 = 1e-12;

/// `|g(z) - log|z|| <= TAIL` whenever `|z| >= R₀`.
const TAIL: f64 = LN_2 / 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubicMap {
    pub a: Complex64,
    pub v: Complex64,
}

impl CubicMap {
    pub fn new(a: Complex64, v: Complex64) -> Self {
        Self { a, v }
    }

    /// Constant term `2a^3 + v`.
    fn b(&self) -> Complex64 {
        2.0 * self.a * self.a * self.a + self.v
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        z * z * z - 3.0 * self.a * self.a * z + self.b()
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        3.0 * (z * z - self.a * self.a)
    }

    /// Marked periodic critical point `+a`.
    pub fn critical(&self) -> Complex64 {
        self.a
    }

    /// Free critical point `-a`.
    pub fn free_critical(&self) -> Complex64 {
        -self.a
    }

    /// Co-critical point of `+a`: the other preimage of `P(a)`.
    pub fn cocritical(&self) -> Complex64 {
        -2.0 * self.a
    }

    /// Co-critical point of `-a`.
    pub fn free_cocritical(&self) -> Complex64 {
        2.0 * self.a
    }

    /// `R₀ = max(4, 2(1 + |a|^2 + |2a^3 + v|))`. For `|z| >= R₀`,
    /// `|z|^3/2 <= |P(z)| <= 3|z|^3/2`.
    pub fn escape_radius(&self) -> f64 {
        (2.0 * (1.0 + self.a.norm_sqr() + self.b().norm())).max(4.0)
    }

    /// `[z, P(z), …, P^k(z)]`.
    pub fn orbit(&self, z: Complex64, k: usize) -> Result<Vec<Complex64>> {
        let mut out = Vec::with_capacity(k + 1);
        let mut w = z;
        out.push(w);
        for i in 1..=k {
            w = self.apply(w);
            if !w.is_finite() {
                return Err(Error::Overflow { iterate: i });
            }
            out.push(w);
        }
        Ok(out)
    }

    /// `P^k(z)`, or `None` on overflow.
    pub fn iterate(&self, z: Complex64, k: usize) -> Option<Complex64> {
        let mut w = z;
        for _ in 0..k {
            w = self.apply(w);
            if !w.is_finite() {
                return None;
            }
        }
        Some(w)
    }

    /// One step in log-polar form: `P(z) = z^3 · t` with
    /// `t = 1 - 3a^2/z^2 + b/z^3`. Returns the new `(log|z|, z/|z|)` and `t`.
    fn step_log(&self, log_r: f64, unit: Complex64) -> (f64, Complex64, Complex64) {
        let inv = unit.conj();
        let t = Complex64::new(1.0, 0.0) - 3.0 * self.a * self.a * (-2.0 * log_r).exp() * inv * inv
            + self.b() * (-3.0 * log_r).exp() * inv * inv * inv;
        let tn = t.norm();
        let next_unit = unit * unit * unit * (t / tn);
        (3.0 * log_r + tn.ln(), next_unit / next_unit.norm(), t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenValue {
    pub value: f64,
    pub error_bound: f64,
    pub iterations_used: usize,
    /// Set when the orbit stayed below `R₀` for the whole budget: the
    /// point may still escape later.
    pub undetermined_possible: bool,
}

impl GreenValue {
    pub fn is_bounded(&self) -> bool {
        self.undetermined_possible
    }

    pub fn lower(&self) -> f64 {
        (self.value - self.error_bound).max(0.0)
    }

    pub fn upper(&self) -> f64 {
        self.value + self.error_bound
    }
}

/// Outcome of Green's-function evaluation that can neither certify escape
/// nor boundedness.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Undetermined {
    pub iterations_used: usize,
    pub last_modulus: f64,
}

/// Green's function `g(z) = lim 3^{-m} log|P^m(z)|`.
///
/// Once `|P^m(z)| >= R₀`, the tail estimate `|g(w) - log|w|| <= log 2 / 2`
/// gives `|g(z) - 3^{-m} log|P^m(z)|| <= 3^{-m} log 2 / 2`; iteration
/// continues until that bound is below `tol` or the budget runs out.
pub fn green(
    map: &CubicMap,
    z: Complex64,
    tol: f64,
    budget: usize,
) -> std::result::Result<GreenValue, Undetermined> {
    assert!(tol > 0.0, "tolerance must be positive");
    let r0 = map.escape_radius();
    let mut w = z;
    let mut m = 0usize;
    let mut peak = 0.0f64;
    while w.norm() < r0 {
        if m == budget {
            // still climbing when the budget ran out: no verdict
            if m > 0 && w.norm() > peak {
                return Err(Undetermined {
                    iterations_used: m,
                    last_modulus: w.norm(),
                });
            }
            return Ok(GreenValue {
                value: 0.0,
                error_bound: green_bound_inside(map) * 3f64.powi(-(m.min(5000) as i32)),
                iterations_used: m,
                undetermined_possible: true,
            });
        }
        peak = peak.max(w.norm());
        w = map.apply(w);
        m += 1;
    }
    let mut log_r = w.norm().ln();
    let mut unit = w / w.norm();
    let mut scale = 3f64.powi(-(m as i32));
    while TAIL * scale > tol && m < budget {
        let (l, u, _) = map.step_log(log_r, unit);
        log_r = l;
        unit = u;
        m += 1;
        scale /= 3.0;
    }
    let value = log_r * scale;
    let rounding = 16.0 * f64::EPSILON * (m as f64 + 1.0) * (value.abs() + 1.0);
    Ok(GreenValue {
        value,
        error_bound: TAIL * scale + rounding,
        iterations_used: m,
        undetermined_possible: false,
    })
}

/// Upper bound on `g` over `|w| <= R₀` (maximum principle plus the tail
/// estimate on the boundary circle).
pub fn green_bound_inside(map: &CubicMap) -> f64 {
    map.escape_radius().ln() + TAIL
}

/// Decides `g(z) < level` using as few iterates as the bounds allow.
/// Returns `None` when the budget is exhausted before a decision.
pub fn below_level(map: &CubicMap, z: Complex64, level: f64, budget: usize) -> Option<bool> {
    let r0 = map.escape_radius();
    let inside_cap = green_bound_inside(map);
    let mut w = z;
    let mut scale = 1.0f64;
    for _ in 0..budget {
        let r = w.norm();
        if r >= r0 {
            // g(z) = scale * g(w), g(w) within TAIL of log r
            let lo = scale * (r.ln() - TAIL);
            let hi = scale * (r.ln() + TAIL);
            if hi < level {
                return Some(true);
            }
            if lo >= level {
                return Some(false);
            }
            let g = green(map, z, (level * 1e-9).max(1e-15), budget).ok()?;
            return Some(g.value < level);
        }
        if scale * inside_cap < level {
            return Some(true);
        }
        w = map.apply(w);
        scale /= 3.0;
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EscapeClass {
    EscapeLocus,
    Bounded,
    Undetermined,
}

/// Whether the free critical point `-a` escapes.
pub fn classify_escape(map: &CubicMap, tol: f64, budget: usize) -> EscapeClass {
    match green(map, map.free_critical(), tol, budget) {
        Err(_) => EscapeClass::Undetermined,
        Ok(g) if g.undetermined_possible => EscapeClass::Bounded,
        Ok(g) if g.value - g.error_bound > 0.0 => EscapeClass::EscapeLocus,
        Ok(_) => EscapeClass::Undetermined,
    }
}

/// Running forward-error estimate for `P^k(a)` evaluated in floating
/// point: each step adds one rounding of the terms and amplifies the
/// carried error by `|P'|`.
pub fn orbit_rounding_bound(map: &CubicMap, k: u32) -> f64 {
    let a = map.a.norm();
    let b = map.b().norm();
    let mut z = map.critical();
    let mut e = 0.0;
    for _ in 0..k {
        let r = z.norm();
        e = map.derivative(z).norm() * e + f64::EPSILON * (r * r * r + 3.0 * a * a * r + b);
        z = map.apply(z);
        if !z.is_finite() {
            return f64::INFINITY;
        }
    }
    e
}

/// Tolerance for confirming that `+a` has period `n`: a relative floor
/// `1e-8·(1 + max(|a|, |v|))`, raised to `8×` the rounding estimate when
/// the orbit is badly conditioned.
pub fn period_tolerance(map: &CubicMap, n: u32) -> f64 {
    let floor = 1e-8 * (1.0 + map.a.norm().max(map.v.norm()));
    floor.max(8.0 * orbit_rounding_bound(map, n))
}

/// Smallest `n <= nmax` with `|P^n(a) - a| < tol` while every earlier
/// iterate stays at least `10·tol` away from `a`.
pub fn exact_period(map: &CubicMap, nmax: u32, tol: f64) -> Result<Option<u32>> {
    if nmax == 0 {
        return Err(Error::Domain("nmax must be at least 1".into()));
    }
    let a = map.critical();
    let mut w = a;
    for d in 1..=nmax {
        w = map.apply(w);
        if !w.is_finite() {
            return Ok(None);
        }
        let dist = (w - a).norm();
        if dist < tol {
            return Ok(Some(d));
        }
        if dist < 10.0 * tol {
            return Err(Error::AmbiguousPeriod { iterate: d });
        }
    }
    Ok(None)
}

/// Böttcher coordinate `φ` with `φ(P(z)) = φ(z)^3` and `φ(z)/z → 1`,
/// as `z · Π_m t_m^{3^{-(m+1)}}` with `t_m = P(z_m)/z_m^3`.
pub fn bottcher(map: &CubicMap, z: Complex64, tol: f64) -> Result<Complex64> {
    let r0 = map.escape_radius();
    let g = green(map, z, tol.min(1e-6), DEFAULT_BUDGET)
        .map_err(|_| Error::Domain("Böttcher coordinate needs an escaping point".into()))?;
    if g.undetermined_possible || g.lower() <= r0.ln() {
        return Err(Error::Domain(
            "Böttcher coordinate is only computed for deep escape (g > log R₀)".into(),
        ));
    }
    let mut log_r = z.norm().ln();
    let mut unit = z / z.norm();
    let mut exponent = Complex64::new(0.0, 0.0);
    let mut weight = 1.0 / 3.0;
    for _ in 0..200 {
        let (l, u, t) = map.step_log(log_r, unit);
        if t.re <= 0.0 || (t - 1.0).norm() >= 1.0 {
            return Err(Error::Branch);
        }
        let term = t.ln() * weight;
        exponent += term;
        log_r = l;
        unit = u;
        weight /= 3.0;
        if term.norm() < tol * 1e-3 || t == Complex64::new(1.0, 0.0) {
            break;
        }
    }
    Ok(z * exponent.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn orbit_small_cases() {
        let z3 = CubicMap::new(c(0.0, 0.0), c(0.0, 0.0));
        assert_eq!(z3.orbit(c(0.0, 0.0), 3).unwrap(), vec![c(0.0, 0.0); 4]);
        let m = CubicMap::new(c(0.3, -0.2), c(1.1, 0.4));
        let o = m.orbit(m.a, 1).unwrap();
        assert!((o[1] - m.v).norm() < 1e-15);
        let o = m.orbit(2.0 * m.a, 1).unwrap();
        let expected = 4.0 * m.a * m.a * m.a + m.v;
        assert!((o[1] - expected).norm() < 1e-14);
    }

    #[test]
    fn orbit_overflow_is_reported() {
        let m = CubicMap::new(c(0.0, 0.0), c(0.0, 0.0));
        assert!(matches!(m.orbit(c(1e10, 0.0), 20), Err(Error::Overflow { .. })));
    }

    #[test]
    fn green_of_pure_cube() {
        let m = CubicMap::new(c(0.0, 0.0), c(0.0, 0.0));
        let g = green(&m, c(6.0, 8.0), DEFAULT_TOL, DEFAULT_BUDGET).unwrap();
        assert!((g.value - 10f64.ln()).abs() < 1e-12);
        assert!(g.error_bound <= 1e-12 + 1e-13);
    }

    #[test]
    fn bounded_and_undetermined() {
        let m = CubicMap::new(c(0.0, 0.0), c(0.0, 0.0));
        assert_eq!(classify_escape(&m, DEFAULT_TOL, DEFAULT_BUDGET), EscapeClass::Bounded);
        // slow escape: the budget ends while the orbit is still growing
        let m = CubicMap::new(c(0.0, 0.0), c(0.0, 0.0));
        let r = green(&m, c(1.0001, 0.0), DEFAULT_TOL, 1);
        assert!(r.is_err());
    }

    #[test]
    fn period_of_pure_cube_and_quadratic_case() {
        let m = CubicMap::new(c(0.0, 0.0), c(0.0, 0.0));
        assert_eq!(exact_period(&m, 6, 1e-10).unwrap(), Some(1));
        // a = 1, v^2 + v - 1 = 0
        let v = (-1.0 + 5f64.sqrt()) / 2.0;
        let m = CubicMap::new(c(1.0, 0.0), c(v, 0.0));
        assert_eq!(exact_period(&m, 6, 1e-10).unwrap(), Some(2));
        let m = CubicMap::new(c(0.31, 0.17), c(-0.52, 0.91));
        assert_eq!(exact_period(&m, 6, 1e-10).unwrap(), None);
    }

    #[test]
    fn period_ambiguity_is_explicit() {
        let v = (-1.0 + 5f64.sqrt()) / 2.0 + 5e-10;
        let m = CubicMap::new(c(1.0, 0.0), c(v, 0.0));
        // |P^2(a) - a| is of order 1e-9: between tol and 10 tol
        let r = exact_period(&m, 4, 1e-10);
        assert!(matches!(r, Err(Error::AmbiguousPeriod { iterate: 2 })), "{r:?}");
    }

    #[test]
    fn bottcher_of_pure_cube_is_identity() {
        let m = CubicMap::new(c(0.0, 0.0), c(0.0, 0.0));
        let phi = bottcher(&m, c(10.0, 0.0), 1e-12).unwrap();
        assert!((phi - c(10.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn bottcher_rejects_shallow_points() {
        let m = CubicMap::new(c(0.5, 0.0), c(0.2, 0.1));
        assert!(bottcher(&m, c(0.1, 0.0), 1e-12).is_err());
    }

    #[test]
    fn level_test_agrees_with_green() {
        let m = CubicMap::new(c(1.2, 0.3), c(2.0, -1.0));
        let level = green(&m, m.free_critical(), 1e-13, DEFAULT_BUDGET).unwrap().value * 0.9;
        for k in 0..50 {
            let z = Complex64::from_polar(0.2 + 0.08 * k as f64, 0.37 * k as f64);
            let g = green(&m, z, 1e-13, DEFAULT_BUDGET).unwrap();
            if (g.value - level).abs() < 1e-9 {
                continue;
            }
            assert_eq!(below_level(&m, z, level, DEFAULT_BUDGET), Some(g.value < level));
        }
    }
}
