//! Exact integer polynomials in the parameters `(a, v)` of the cubic
//! family `P(z) = z^3 - 3a^2 z + 2a^3 + v`, the periodicity polynomials
//! `Q_n` and their exact-period factors `Φ_n`.

mod bivariate;
mod cache;
pub mod modular;
mod resultant;
mod univariate;

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;

pub use bivariate::{BivariatePolynomial, InvolutionSign, Variable};
pub use cache::{format_cache_file, parse_cache_file, read_cache_file, write_cache_file, CACHE_HEADER};
pub use resultant::{
    bareiss_determinant, discriminant_v, resultant_coefficient_bound, resultant_degree_bound,
    resultant_v, resultant_v_bareiss, sylvester_matrix,
};
pub use univariate::UnivariatePolynomial;

use crate::error::{Error, Result};

/// Default ceiling on `n` for symbolic constructions.
pub const DEFAULT_DEGREE_BUDGET: u32 = 8;

fn check_budget(n: u32, budget: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("period must be at least 1".into()));
    }
    if n > budget {
        return Err(Error::DegreeBudget { n, limit: budget });
    }
    Ok(())
}

/// `P_{a,v}(z)` with `z` itself a polynomial in `(a, v)`.
pub fn apply_family(z: &BivariatePolynomial) -> BivariatePolynomial {
    let cube = &(z * z) * z;
    let linear = &BivariatePolynomial::monomial(3, 2, 0) * z;
    let constant = &BivariatePolynomial::monomial(2, 3, 0) + &BivariatePolynomial::v();
    &(&cube - &linear) + &constant
}

/// The orbit polynomials `P^k(a)` for `k = 0..=n`.
fn critical_orbit_polynomials(n: u32) -> Vec<BivariatePolynomial> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(BivariatePolynomial::a());
    for _ in 0..n {
        let next = apply_family(out.last().unwrap());
        out.push(next);
    }
    out
}

/// `Q_n(a, v) = P^n_{a,v}(a) - a`.
pub fn build_qn(n: u32, budget: u32) -> Result<BivariatePolynomial> {
    check_budget(n, budget)?;
    let orbit = critical_orbit_polynomials(n);
    Ok(&orbit[n as usize] - &BivariatePolynomial::a())
}

pub fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// `Φ_n = Q_n / ∏_{d | n, d < n} Φ_d`, with the product identity
/// `∏_{d|n} Φ_d = Q_n` verified by exact multiplication.
pub fn build_phin(n: u32, budget: u32) -> Result<Arc<BivariatePolynomial>> {
    check_budget(n, budget)?;
    PhiCache::global().get_or_build(n, budget)
}

fn construct_phin(n: u32, budget: u32) -> Result<BivariatePolynomial> {
    let qn = build_qn(n, budget)?;
    let mut lower = BivariatePolynomial::one();
    for d in divisors(n).into_iter().filter(|&d| d < n) {
        lower = &lower * &*build_phin(d, budget)?;
    }
    let (quot, rem) = qn.div_rem_v(&lower);
    if !rem.is_zero() {
        return Err(Error::Internal(format!(
            "Q_{n} is not divisible by the lower exact-period factors"
        )));
    }
    if &lower * &quot != qn {
        return Err(Error::Internal(format!(
            "product of exact-period factors differs from Q_{n}"
        )));
    }
    Ok(quot)
}

/// Write-once store of exact-period polynomials, shared process-wide.
///
/// Concurrent builders may both construct the same `Φ_n`; the first
/// insertion wins and later ones must agree with it exactly.
#[derive(Default)]
pub struct PhiCache {
    entries: RwLock<HashMap<u32, Arc<BivariatePolynomial>>>,
}

impl PhiCache {
    pub fn global() -> &'static PhiCache {
        static CACHE: OnceLock<PhiCache> = OnceLock::new();
        CACHE.get_or_init(PhiCache::default)
    }

    pub fn get(&self, n: u32) -> Option<Arc<BivariatePolynomial>> {
        self.entries.read().unwrap().get(&n).cloned()
    }

    pub fn get_or_build(&self, n: u32, budget: u32) -> Result<Arc<BivariatePolynomial>> {
        if let Some(p) = self.get(n) {
            return Ok(p);
        }
        let built = Arc::new(construct_phin(n, budget)?);
        self.insert(n, built)
    }

    /// Inserts unless present; an existing entry must be identical.
    pub fn insert(&self, n: u32, p: Arc<BivariatePolynomial>) -> Result<Arc<BivariatePolynomial>> {
        let mut map = self.entries.write().unwrap();
        match map.get(&n) {
            Some(existing) if **existing != *p => Err(Error::Internal(format!(
                "conflicting cached values for Φ_{n}"
            ))),
            Some(existing) => Ok(existing.clone()),
            None => {
                map.insert(n, p.clone());
                Ok(p)
            }
        }
    }
}

/// `∏_{d|n} Φ_d` recomputed from scratch, for identity checks.
pub fn dynatomic_product(n: u32, budget: u32) -> Result<BivariatePolynomial> {
    let mut acc = BivariatePolynomial::one();
    for d in divisors(n) {
        acc = &acc * &*build_phin(d, budget)?;
    }
    Ok(acc)
}

/// `deg_v Φ_n` predicted by Möbius inversion of `deg_v Q_d = 3^{d-1}`.
pub fn expected_phin_degree_v(n: u32) -> i64 {
    divisors(n)
        .into_iter()
        .map(|d| mobius(n / d) * 3i64.pow(d - 1))
        .sum()
}

pub fn mobius(mut n: u32) -> i64 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Numeric `v`-coefficients of a polynomial, kept as floats for fast
/// repeated evaluation at complex `(a, v)`.
#[derive(Clone, Debug)]
pub struct NumericCurve {
    coeffs: Vec<Vec<f64>>,
    abs_coeffs: Vec<Vec<f64>>,
    total_degree: usize,
}

impl NumericCurve {
    pub fn new(p: &BivariatePolynomial) -> Self {
        let coeffs: Vec<Vec<f64>> = p.v_coefficients().iter().map(|c| c.to_f64()).collect();
        let abs_coeffs = coeffs
            .iter()
            .map(|c| c.iter().map(|x| x.abs()).collect())
            .collect();
        let total_degree = p.total_degree() as usize;
        Self { coeffs, abs_coeffs, total_degree }
    }

    pub fn degree_v(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Coefficients of `v^j` at the parameter `a`, lowest first.
    pub fn coefficients_at(&self, a: Complex64) -> Vec<Complex64> {
        self.coeffs.iter().map(|c| horner(c, a)).collect()
    }

    /// Coefficients `q_j` and scale `s` with `p(a, s·w) = s^D Σ q_j w^j`,
    /// `D` the total degree. For `|a| > 1` the scale is `a` and each
    /// `q_j = c_j(a) a^(j - D)` is evaluated as a polynomial in `1/a`, so
    /// nothing overflows however large `a` is.
    pub fn scaled_coefficients_at(&self, a: Complex64) -> (Vec<Complex64>, Complex64) {
        if a.norm() <= 1.0 {
            return (self.coefficients_at(a), Complex64::new(1.0, 0.0));
        }
        let t = a.inv();
        let q = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let top = self.total_degree - j;
                (0..=top).fold(Complex64::new(0.0, 0.0), |acc, i| {
                    acc * t + c.get(i).copied().unwrap_or(0.0)
                })
            })
            .collect();
        (q, a)
    }

    /// Coefficients of `∂/∂a` at `a`, lowest power of `v` first.
    pub fn a_derivative_coefficients_at(&self, a: Complex64) -> Vec<Complex64> {
        self.coeffs
            .iter()
            .map(|c| {
                let d: Vec<f64> = c.iter().enumerate().skip(1).map(|(k, x)| k as f64 * x).collect();
                horner(&d, a)
            })
            .collect()
    }

    /// `Σ_j |c_j|(|a|) |v|^j`: the natural scale for residuals at `(a, v)`.
    pub fn magnitude_at(&self, a: f64, v: f64) -> f64 {
        self.abs_coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * v + c.iter().rev().fold(0.0, |s, x| s * a + x))
    }

    pub fn total_degree(&self) -> usize {
        self.total_degree
    }

    pub fn evaluate(&self, a: Complex64, v: Complex64) -> Complex64 {
        horner_c(&self.coefficients_at(a), v)
    }

    /// Backward error `|p(a, v)| / Σ_j |c_j(a)| |v|^j`, computed in the
    /// rescaled coordinates so nothing overflows at large `|a|`.
    pub fn relative_residual(&self, a: Complex64, v: Complex64) -> f64 {
        let (q, s) = self.scaled_coefficients_at(a);
        crate::roots::relative_residual(&q, v / s)
    }
}

fn horner(c: &[f64], x: Complex64) -> Complex64 {
    c.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &k| acc * x + k)
}

pub(crate) fn horner_c(c: &[Complex64], x: Complex64) -> Complex64 {
    c.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &k| acc * x + k)
}
