use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::univariate::UnivariatePolynomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variable {
    A,
    V,
}

/// Sign `s` with `p(-a, -v) = s·p(a, v)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum InvolutionSign {
    Plus,
    Minus,
}

impl InvolutionSign {
    pub fn as_i32(self) -> i32 {
        match self {
            InvolutionSign::Plus => 1,
            InvolutionSign::Minus => -1,
        }
    }
}

/// Exact polynomial in `(a, v)` with integer coefficients.
///
/// Terms are keyed by `(i, j)` for the monomial `a^i v^j`; zero
/// coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BivariatePolynomial {
    terms: BTreeMap<(u32, u32), BigInt>,
}

impl BivariatePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn monomial(c: impl Into<BigInt>, i: u32, j: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(i, j, c.into());
        p
    }

    pub fn a() -> Self {
        Self::monomial(1, 1, 0)
    }

    pub fn v() -> Self {
        Self::monomial(1, 0, 1)
    }

    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (u32, u32, C)>,
        C: Into<BigInt>,
    {
        let mut p = Self::zero();
        for (i, j, c) in terms {
            p.add_term(i, j, c.into());
        }
        p
    }

    fn add_term(&mut self, i: u32, j: u32, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry((i, j)).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, &BigInt)> + '_ {
        self.terms.iter().map(|(&(i, j), c)| (i, j, c))
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, i: u32, j: u32) -> BigInt {
        self.terms.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree_a(&self) -> u32 {
        self.terms.keys().map(|&(i, _)| i).max().unwrap_or(0)
    }

    pub fn degree_v(&self) -> u32 {
        self.terms.keys().map(|&(_, j)| j).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|&(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(&k, x)| (k, x * c)).collect(),
        }
    }

    /// Coefficients in `v`: entry `j` is the coefficient of `v^j` as a
    /// polynomial in `a`. Empty for the zero polynomial.
    pub fn v_coefficients(&self) -> Vec<UnivariatePolynomial> {
        if self.is_zero() {
            return Vec::new();
        }
        let dv = self.degree_v() as usize;
        let mut dense: Vec<Vec<BigInt>> = vec![Vec::new(); dv + 1];
        for (&(i, j), c) in &self.terms {
            let row = &mut dense[j as usize];
            if row.len() <= i as usize {
                row.resize(i as usize + 1, BigInt::zero());
            }
            row[i as usize] = c.clone();
        }
        dense.into_iter().map(UnivariatePolynomial::from_coeffs).collect()
    }

    pub fn from_v_coefficients(coeffs: &[UnivariatePolynomial]) -> Self {
        let mut p = Self::zero();
        for (j, c) in coeffs.iter().enumerate() {
            for (i, x) in c.coeffs().iter().enumerate() {
                p.add_term(i as u32, j as u32, x.clone());
            }
        }
        p
    }

    /// Exact division `self / divisor` as polynomials in `v` over `Z[a]`.
    /// Returns `(quotient, remainder)`; the remainder is zero exactly when
    /// the division is exact. The leading `v`-coefficient of the divisor
    /// must divide every leading coefficient met along the way; if it does
    /// not, the division stops and the current partial remainder is
    /// returned (which is then nonzero).
    pub fn div_rem_v(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let dcoef = divisor.v_coefficients();
        let dd = dcoef.len() - 1;
        let lead = &dcoef[dd];
        let mut rem = self.v_coefficients();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![UnivariatePolynomial::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let top = &rem[k + dd];
            if top.is_zero() {
                continue;
            }
            let Some(q) = top.div_exact(lead) else {
                return (Self::from_v_coefficients(&quot), Self::from_v_coefficients(&rem));
            };
            for (i, c) in dcoef.iter().enumerate() {
                if !c.is_zero() {
                    rem[k + i] = &rem[k + i] - &(&q * c);
                }
            }
            quot[k] = q;
        }
        (Self::from_v_coefficients(&quot), Self::from_v_coefficients(&rem))
    }

    pub fn partial_derivative(&self, var: Variable) -> Self {
        let mut p = Self::zero();
        for (&(i, j), c) in &self.terms {
            match var {
                Variable::A if i > 0 => p.add_term(i - 1, j, c * BigInt::from(i)),
                Variable::V if j > 0 => p.add_term(i, j - 1, c * BigInt::from(j)),
                _ => {}
            }
        }
        p
    }

    /// `Some(s)` when `p(-a, -v) = s·p(a, v)` holds exactly.
    ///
    /// Panics on the zero polynomial.
    pub fn involution_symmetry_sign(&self) -> Option<InvolutionSign> {
        assert!(!self.is_zero(), "symmetry sign of the zero polynomial");
        let mut parities = self.terms.keys().map(|&(i, j)| (i + j) % 2);
        let first = parities.next()?;
        if parities.all(|q| q == first) {
            Some(if first == 0 {
                InvolutionSign::Plus
            } else {
                InvolutionSign::Minus
            })
        } else {
            None
        }
    }

    /// Floating-point value at `(a, v)`: Horner in `v` with coefficients
    /// evaluated in `a`. Subject to ordinary round-off.
    pub fn evaluate(&self, a: Complex64, v: Complex64) -> Complex64 {
        self.v_coefficients()
            .iter()
            .rev()
            .fold(Complex64::zero(), |acc, c| acc * v + c.eval(a))
    }

    /// Exact value of the `v`-coefficients at an integer `a`.
    pub fn specialize_a(&self, a: &BigInt) -> Vec<BigInt> {
        self.v_coefficients().iter().map(|c| c.eval_bigint(a)).collect()
    }

    /// Sum of absolute values of all coefficients.
    pub fn norm1(&self) -> BigInt {
        self.terms.values().map(|c| c.abs()).sum()
    }

    pub fn max_abs_coefficient(&self) -> BigInt {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_default()
    }

    /// Largest coefficient magnitude as a float (for residual scaling).
    pub fn max_abs_coefficient_f64(&self) -> f64 {
        self.max_abs_coefficient().to_f64().unwrap_or(f64::INFINITY)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl Add for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn add(self, rhs: Self) -> BivariatePolynomial {
        let mut out = self.clone();
        for (&(i, j), c) in &rhs.terms {
            out.add_term(i, j, c.clone());
        }
        out
    }
}

impl Sub for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn sub(self, rhs: Self) -> BivariatePolynomial {
        let mut out = self.clone();
        for (&(i, j), c) in &rhs.terms {
            out.add_term(i, j, -c);
        }
        out
    }
}

impl Neg for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn neg(self) -> BivariatePolynomial {
        BivariatePolynomial {
            terms: self.terms.iter().map(|(&k, c)| (k, -c)).collect(),
        }
    }
}

impl Mul for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn mul(self, rhs: Self) -> BivariatePolynomial {
        if self.is_zero() || rhs.is_zero() {
            return BivariatePolynomial::zero();
        }
        // Dense accumulator over the product's bounding box.
        let width = (self.degree_v() + rhs.degree_v() + 1) as usize;
        let height = (self.degree_a() + rhs.degree_a() + 1) as usize;
        let mut acc = vec![BigInt::zero(); width * height];
        let rhs_terms: Vec<_> = rhs.terms().collect();
        for (i1, j1, c1) in self.terms() {
            for &(i2, j2, c2) in &rhs_terms {
                acc[(i1 + i2) as usize * width + (j1 + j2) as usize] += c1 * c2;
            }
        }
        let mut terms = BTreeMap::new();
        for (k, c) in acc.into_iter().enumerate() {
            if !c.is_zero() {
                terms.insert(((k / width) as u32, (k % width) as u32), c);
            }
        }
        BivariatePolynomial { terms }
    }
}

impl fmt::Display for BivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Highest power of v first, then highest power of a.
        let mut ordered: Vec<_> = self.terms.iter().collect();
        ordered.sort_by(|(x, _), (y, _)| (y.1, y.0).cmp(&(x.1, x.0)));
        let mut first = true;
        for (&(i, j), c) in ordered {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let mut factors = Vec::new();
            if !mag.is_one() || (i == 0 && j == 0) {
                factors.push(mag.to_string());
            }
            match i {
                0 => {}
                1 => factors.push("a".into()),
                _ => factors.push(format!("a^{i}")),
            }
            match j {
                0 => {}
                1 => factors.push("v".into()),
                _ => factors.push(format!("v^{j}")),
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}
