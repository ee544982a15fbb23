//! Resultants with respect to `v`.
//!
//! Two independent routes are provided. [`resultant_v`] specializes `a`
//! at many points modulo word-size primes, takes each univariate resultant
//! by the Euclidean remainder sequence over the prime field, interpolates,
//! and lifts by Chinese remaindering up to a proven coefficient bound.
//! [`resultant_v_bareiss`] is the Sylvester determinant computed with
//! fraction-free elimination over `Z[a]`; it is exact but only practical
//! for small inputs.

use num_bigint::BigInt;
use rayon::prelude::*;

use super::bivariate::{BivariatePolynomial, Variable};
use super::modular::{bigint_mod, bit_length, primes_below_2_62, CrtAccumulator, Zp};
use super::univariate::UnivariatePolynomial;
use crate::error::{Error, Result};

fn check_inputs(p: &BivariatePolynomial, q: &BivariatePolynomial) -> Result<()> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::Domain("resultant of a zero polynomial".into()));
    }
    if p.degree_v() == 0 && q.degree_v() == 0 {
        return Err(Error::Domain(
            "resultant needs at least one input of positive degree in v".into(),
        ));
    }
    Ok(())
}

/// Upper bound on `deg_a Res_v(p, q)`.
pub fn resultant_degree_bound(p: &BivariatePolynomial, q: &BivariatePolynomial) -> usize {
    let (m, n) = (p.degree_v() as usize, q.degree_v() as usize);
    let rows = n * p.degree_a() as usize + m * q.degree_a() as usize;
    let bezout = p.total_degree() as usize * q.total_degree() as usize;
    rows.min(bezout)
}

/// Bound on the magnitude of every coefficient of `Res_v(p, q)`: the
/// product of the row 1-norms of the Sylvester matrix.
pub fn resultant_coefficient_bound(p: &BivariatePolynomial, q: &BivariatePolynomial) -> BigInt {
    let (m, n) = (p.degree_v(), q.degree_v());
    num_traits::pow(p.norm1(), n as usize) * num_traits::pow(q.norm1(), m as usize)
}

/// Resultant of two polynomials over `Z/p` given densely, lowest degree
/// first, with nonzero leading coefficients.
fn resultant_mod(a: &[u64], b: &[u64], zp: &Zp) -> u64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    let mut acc = 1u64;
    loop {
        if a.is_empty() || b.is_empty() {
            return 0;
        }
        let m = a.len() - 1;
        let n = b.len() - 1;
        if n == 0 {
            return zp.mul(acc, zp.pow(b[0], m as u64));
        }
        if m == 0 {
            return zp.mul(acc, zp.pow(a[0], n as u64));
        }
        // res(A, B) = (-1)^{mn} lc(B)^{m - r} res(B, A mod B)
        let r = rem_mod(&a, &b, zp);
        if r.is_empty() {
            return 0;
        }
        let rd = r.len() - 1;
        let lc = *b.last().unwrap();
        acc = zp.mul(acc, zp.pow(lc, (m - rd) as u64));
        if (m * n) % 2 == 1 {
            acc = zp.neg(acc);
        }
        a = b;
        b = r;
    }
}

fn trim(x: &mut Vec<u64>) {
    while x.last() == Some(&0) {
        x.pop();
    }
}

fn rem_mod(a: &[u64], b: &[u64], zp: &Zp) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let inv = zp.inv(b[db]);
    while r.len() > db {
        let top = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if top != 0 {
            let f = zp.mul(top, inv);
            for (i, &bi) in b.iter().enumerate() {
                r[shift + i] = zp.sub(r[shift + i], zp.mul(f, bi));
            }
        }
        r.pop();
        trim(&mut r);
    }
    r
}

/// Newton interpolation through `(xs[k], ys[k])`, returning monomial
/// coefficients modulo `p`.
fn interpolate_mod(xs: &[u64], ys: &[u64], zp: &Zp) -> Vec<u64> {
    let n = xs.len();
    let mut dd = ys.to_vec();
    for level in 1..n {
        for k in (level..n).rev() {
            let num = zp.sub(dd[k], dd[k - 1]);
            let den = zp.sub(xs[k], xs[k - level]);
            dd[k] = zp.mul(num, zp.inv(den));
        }
    }
    // Horner on the Newton form.
    let mut coeffs = vec![0u64; n];
    for k in (0..n).rev() {
        // coeffs = coeffs * (x - xs[k]) + dd[k]
        let mut next = vec![0u64; n];
        for i in 0..n {
            if coeffs[i] == 0 {
                continue;
            }
            if i + 1 < n {
                next[i + 1] = zp.add(next[i + 1], coeffs[i]);
            }
            next[i] = zp.sub(next[i], zp.mul(coeffs[i], xs[k]));
        }
        next[0] = zp.add(next[0], dd[k]);
        coeffs = next;
    }
    coeffs
}

/// Resultant image modulo one prime; `None` for an unlucky prime whose
/// field is too small to supply enough good evaluation points.
fn resultant_image(
    pc: &[UnivariatePolynomial],
    qc: &[UnivariatePolynomial],
    points: usize,
    prime: u64,
) -> Option<Vec<u64>> {
    let zp = Zp::new(prime);
    let reduce = |cs: &[UnivariatePolynomial]| -> Vec<Vec<u64>> {
        cs.iter()
            .map(|c| c.coeffs().iter().map(|x| bigint_mod(x, prime)).collect())
            .collect()
    };
    let (pr, qr) = (reduce(pc), reduce(qc));
    let eval = |cs: &[Vec<u64>], x: u64| -> Vec<u64> {
        cs.iter()
            .map(|c| c.iter().rev().fold(0, |acc, &k| zp.add(zp.mul(acc, x), k)))
            .collect()
    };
    let mut xs = Vec::with_capacity(points);
    let mut ys = Vec::with_capacity(points);
    let mut x = 0u64;
    while xs.len() < points {
        if x >= prime {
            return None;
        }
        let ps = eval(&pr, x);
        let qs = eval(&qr, x);
        if ps.last() != Some(&0) && qs.last() != Some(&0) {
            xs.push(x);
            ys.push(resultant_mod(&ps, &qs, &zp));
        }
        x += 1;
    }
    Some(interpolate_mod(&xs, &ys, &zp))
}

/// Exact `Res_v(p, q)` as a polynomial in `a`.
pub fn resultant_v(p: &BivariatePolynomial, q: &BivariatePolynomial) -> Result<UnivariatePolynomial> {
    check_inputs(p, q)?;
    let points = resultant_degree_bound(p, q) + 1;
    let needed_bits = bit_length(&resultant_coefficient_bound(p, q)) + 2;
    let pc = p.v_coefficients();
    let qc = q.v_coefficients();

    // Each prime contributes 61 bits; take a few spares for skipped primes.
    let count = (needed_bits / 61 + 1) as usize;
    let primes: Vec<u64> = primes_below_2_62().take(count + 4).collect();
    let images: Vec<(u64, Vec<u64>)> = primes
        .par_iter()
        .take(count)
        .filter_map(|&pr| resultant_image(&pc, &qc, points, pr).map(|img| (pr, img)))
        .collect();

    let mut crt = CrtAccumulator::new(points);
    for (pr, img) in &images {
        crt.push(img, *pr);
    }
    let mut spare = primes[count..].iter();
    while bit_length(crt.modulus()) < needed_bits {
        let &pr = spare
            .next()
            .ok_or_else(|| Error::Internal("ran out of primes for the resultant".into()))?;
        if let Some(img) = resultant_image(&pc, &qc, points, pr) {
            crt.push(&img, pr);
        }
    }
    Ok(UnivariatePolynomial::from_coeffs(crt.symmetric()))
}

/// `Res_v(p, ∂p/∂v)`.
pub fn discriminant_v(p: &BivariatePolynomial) -> Result<UnivariatePolynomial> {
    if p.degree_v() == 0 {
        return Err(Error::Domain("discriminant of a polynomial constant in v".into()));
    }
    resultant_v(p, &p.partial_derivative(Variable::V))
}

/// Sylvester matrix of `p` and `q` in `v`, highest powers first.
pub fn sylvester_matrix(
    p: &BivariatePolynomial,
    q: &BivariatePolynomial,
) -> Vec<Vec<UnivariatePolynomial>> {
    let pc = p.v_coefficients();
    let qc = q.v_coefficients();
    let m = pc.len() - 1;
    let n = qc.len() - 1;
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for shift in 0..n {
        let mut row = vec![UnivariatePolynomial::zero(); size];
        for (k, c) in pc.iter().rev().enumerate() {
            row[shift + k] = c.clone();
        }
        rows.push(row);
    }
    for shift in 0..m {
        let mut row = vec![UnivariatePolynomial::zero(); size];
        for (k, c) in qc.iter().rev().enumerate() {
            row[shift + k] = c.clone();
        }
        rows.push(row);
    }
    rows
}

/// Fraction-free (Bareiss) determinant over `Z[a]`.
pub fn bareiss_determinant(mut m: Vec<Vec<UnivariatePolynomial>>) -> Result<UnivariatePolynomial> {
    let size = m.len();
    if size == 0 {
        return Ok(UnivariatePolynomial::constant(1));
    }
    let mut negate = false;
    let mut prev = UnivariatePolynomial::constant(1);
    for k in 0..size - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..size).find(|&r| !m[r][k].is_zero()) else {
                return Ok(UnivariatePolynomial::zero());
            };
            m.swap(k, swap);
            negate = !negate;
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let num = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.div_exact(&prev).ok_or_else(|| {
                    Error::Internal("inexact division in fraction-free elimination".into())
                })?;
            }
            m[i][k] = UnivariatePolynomial::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[size - 1][size - 1].clone();
    Ok(if negate { -&det } else { det })
}

/// `Res_v(p, q)` as an exact Sylvester determinant.
pub fn resultant_v_bareiss(
    p: &BivariatePolynomial,
    q: &BivariatePolynomial,
) -> Result<UnivariatePolynomial> {
    check_inputs(p, q)?;
    if q.degree_v() == 0 {
        let c = &q.v_coefficients()[0];
        return Ok((0..p.degree_v()).fold(UnivariatePolynomial::constant(1), |acc, _| &acc * c));
    }
    if p.degree_v() == 0 {
        let c = &p.v_coefficients()[0];
        return Ok((0..q.degree_v()).fold(UnivariatePolynomial::constant(1), |acc, _| &acc * c));
    }
    bareiss_determinant(sylvester_matrix(p, q))
}
