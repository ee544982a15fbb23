//! Simultaneous polynomial root finding (Aberth–Ehrlich) in double
//! precision, with Newton-polygon starting points so that coefficients
//! spanning many orders of magnitude are handled.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct AberthSettings {
    pub max_iterations: usize,
    /// Relative correction size at which a root is considered converged.
    pub tolerance: f64,
}

impl Default for AberthSettings {
    fn default() -> Self {
        Self {
            max_iterations: 800,
            tolerance: 4.0 * f64::EPSILON,
        }
    }
}

/// `p(z)`, `p'(z)` and `Σ|c_k||z|^k`, evaluated in the reversed
/// polynomial when `|z| > 1` so that high powers never overflow. The
/// three values are returned up to a common positive factor.
pub(crate) fn eval_with_derivative(c: &[Complex64], z: Complex64) -> (Complex64, Complex64, f64) {
    let d = c.len() - 1;
    if z.norm() <= 1.0 {
        let mut p = c[d];
        let mut dp = Complex64::zero();
        let mut scale = c[d].norm();
        let r = z.norm();
        for k in (0..d).rev() {
            dp = dp * z + p;
            p = p * z + c[k];
            scale = scale * r + c[k].norm();
        }
        (p, dp, scale)
    } else {
        // q(y) = y^d p(1/y) with y = 1/z; then p'/p = y (d - y q'/q).
        let y = z.inv();
        let mut q = c[0];
        let mut dq = Complex64::zero();
        let mut scale = c[0].norm();
        let r = y.norm();
        for k in 1..=d {
            dq = dq * y + q;
            q = q * y + c[k];
            scale = scale * r + c[k].norm();
        }
        // p(z) = z^d q(y); return values scaled by y^d.
        let p = q;
        let dp = (Complex64::new(d as f64, 0.0) * q - y * dq) * y;
        (p, dp, scale)
    }
}

/// Starting points from the upper convex hull of `(k, log|c_k|)`.
fn initial_guesses(c: &[Complex64]) -> Vec<Complex64> {
    let d = c.len() - 1;
    let logs: Vec<f64> = c
        .iter()
        .map(|x| if x.is_zero() { f64::NEG_INFINITY } else { x.norm().ln() })
        .collect();
    let mut hull: Vec<usize> = Vec::new();
    for k in 0..=d {
        if logs[k] == f64::NEG_INFINITY {
            continue;
        }
        while hull.len() >= 2 {
            let (i, j) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (j - i) as f64 * (logs[k] - logs[i]) - (k - i) as f64 * (logs[j] - logs[i]);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    let mut guesses = Vec::with_capacity(d);
    // Zero roots implied by vanishing low coefficients.
    let lowest = hull.first().copied().unwrap_or(0);
    let tiny = 1e-300f64;
    for _ in 0..lowest {
        guesses.push(Complex64::new(tiny, 0.0));
    }
    let sigma = 0.7;
    for w in hull.windows(2) {
        let (i, j) = (w[0], w[1]);
        let m = j - i;
        let radius = ((logs[i] - logs[j]) / m as f64).exp();
        for t in 0..m {
            let angle = 2.0 * std::f64::consts::PI * t as f64 / m as f64
                + 2.0 * std::f64::consts::PI * i as f64 / d as f64
                + sigma;
            guesses.push(Complex64::from_polar(radius, angle));
        }
    }
    guesses
}

/// All `d` roots of `Σ c_k z^k` (coefficients lowest first).
pub fn aberth(c: &[Complex64], settings: AberthSettings) -> Result<Vec<Complex64>> {
    let mut c = c.to_vec();
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    if c.len() <= 1 {
        return Ok(Vec::new());
    }
    // complex division squares magnitudes, so keep coefficients near 1
    let top = c.iter().map(|x| x.norm()).fold(0.0, f64::max);
    for x in c.iter_mut() {
        *x /= top;
    }
    let d = c.len() - 1;
    if d == 1 {
        return Ok(vec![-c[0] / c[1]]);
    }
    let mut z = initial_guesses(&c);
    debug_assert_eq!(z.len(), d);
    let mut done = vec![false; d];
    for _ in 0..settings.max_iterations {
        let mut all = true;
        for i in 0..d {
            if done[i] {
                continue;
            }
            let (p, dp, scale) = eval_with_derivative(&c, z[i]);
            if p.norm() <= 4.0 * f64::EPSILON * scale {
                done[i] = true;
                continue;
            }
            let ratio = p / dp;
            let sum: Complex64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if !w.is_finite() {
                all = false;
                continue;
            }
            z[i] -= w;
            if w.norm() <= settings.tolerance * z[i].norm() {
                done[i] = true;
            } else {
                all = false;
            }
        }
        if all {
            return Ok(z);
        }
    }
    if done.iter().all(|&x| x) {
        Ok(z)
    } else {
        Err(Error::RootFinding { degree: d })
    }
}

/// A few Newton steps on one root; returns the polished value.
pub fn newton_polish(c: &[Complex64], mut z: Complex64, steps: usize) -> Complex64 {
    for _ in 0..steps {
        let (p, dp, _) = eval_with_derivative(c, z);
        if dp.is_zero() {
            break;
        }
        let w = p / dp;
        if !w.is_finite() {
            break;
        }
        z -= w;
        if w.norm() <= f64::EPSILON * z.norm() {
            break;
        }
    }
    z
}

/// Backward-error residual `|p(z)| / Σ|c_k||z|^k`.
pub fn relative_residual(c: &[Complex64], z: Complex64) -> f64 {
    let (p, _, scale) = eval_with_derivative(c, z);
    if scale == 0.0 {
        0.0
    } else {
        p.norm() / scale
    }
}

/// Integer polynomial coefficients divided by a common power of two so the
/// largest has magnitude below one. Coefficients far below the largest may
/// underflow to zero; that only perturbs roots within the backward error
/// already inherent in double precision.
#[derive(Clone, Debug)]
pub struct ScaledPolynomial {
    pub coeffs: Vec<Complex64>,
    pub exponent: i64,
}

impl ScaledPolynomial {
    pub fn from_bigint(coeffs: &[BigInt]) -> Self {
        let top_bits = coeffs.iter().map(|c| c.bits()).max().unwrap_or(0) as i64;
        let exponent = top_bits;
        let scaled = coeffs
            .iter()
            .map(|c| {
                let bits = c.bits() as i64;
                if bits == 0 {
                    return Complex64::zero();
                }
                // keep 60 leading bits, then apply the remaining power of two
                let drop = (bits - 60).max(0);
                let head = (c >> drop as usize).to_f64().unwrap_or(0.0);
                Complex64::new(head * 2f64.powi((drop - exponent) as i32), 0.0)
            })
            .collect();
        Self { coeffs: scaled, exponent }
    }
}

/// Clusters points closer than `tol`, returning one representative
/// (the cluster mean) per cluster together with its multiplicity.
pub fn cluster_points(points: &[Complex64], tol: f64) -> Vec<(Complex64, usize)> {
    let mut parent: Vec<usize> = (0..points.len()).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if (points[i] - points[j]).norm() < tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<Complex64>> = Default::default();
    for i in 0..points.len() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(points[i]);
    }
    groups
        .into_values()
        .map(|g| {
            let mean = g.iter().sum::<Complex64>() / g.len() as f64;
            (mean, g.len())
        })
        .collect()
}

/// Sorts complex numbers by real part, then imaginary part.
pub fn sort_lexicographic(z: &mut [Complex64]) {
    z.sort_by(|x, y| {
        x.re.partial_cmp(&y.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(x.im.partial_cmp(&y.im).unwrap_or(std::cmp::Ordering::Equal))
    });
}
