use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Dense integer polynomial in the parameter `a`, lowest degree first.
///
/// The coefficient list never ends in a zero, so the zero polynomial has
/// an empty coefficient list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct UnivariatePolynomial {
    coeffs: Vec<BigInt>,
}

impl UnivariatePolynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::from_coeffs(vec![c.into()])
    }

    /// The monomial `c·a^k`.
    pub fn monomial(c: impl Into<BigInt>, k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = c.into();
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coefficient(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigInt::from(k))
                .collect(),
        )
    }

    /// Gcd of the coefficients (nonnegative; zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive_part(&self) -> Self {
        let g = self.content();
        if g.is_zero() {
            return Self::zero();
        }
        let sign = if self.coeffs.last().is_some_and(Signed::is_negative) {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        let g = g * sign;
        Self::from_coeffs(self.coeffs.iter().map(|c| c / &g).collect())
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Exact division by a nonzero integer; `None` if some coefficient is
    /// not divisible.
    pub fn div_exact_scalar(&self, c: &BigInt) -> Option<Self> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for x in &self.coeffs {
            let (q, r) = x.div_rem(c);
            if !r.is_zero() {
                return None;
            }
            out.push(q);
        }
        Some(Self::from_coeffs(out))
    }

    /// Exact polynomial division; `None` when the remainder is nonzero.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        let dd = divisor.degree()?;
        if self.is_zero() {
            return Some(Self::zero());
        }
        let nd = self.degree().unwrap_or(0);
        if nd < dd {
            return None;
        }
        let lead = divisor.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let top = std::mem::take(&mut rem[k + dd]);
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(&lead);
            if !r.is_zero() {
                return None;
            }
            for (i, c) in divisor.coeffs.iter().enumerate().take(dd) {
                if !c.is_zero() {
                    rem[k + i] -= &q * c;
                }
            }
            quot[k] = q;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Self::from_coeffs(quot))
    }

    /// Pseudo-remainder `lc(d)^(deg self - deg d + 1) · self mod d`.
    pub fn pseudo_remainder(&self, divisor: &Self) -> Self {
        let dd = divisor.degree().expect("pseudo-division by zero");
        let lead = &divisor.coeffs[dd];
        let mut rem = self.coeffs.clone();
        while rem.len() > dd {
            let k = rem.len() - 1;
            let top = rem.pop().unwrap();
            for c in rem.iter_mut() {
                *c *= lead;
            }
            if !top.is_zero() {
                for (i, c) in divisor.coeffs.iter().enumerate().take(dd) {
                    rem[k - dd + i] -= &top * c;
                }
            }
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        Self::from_coeffs(rem)
    }

    /// Primitive gcd with positive leading coefficient (primitive
    /// remainder sequence).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut f, mut g) = (self.primitive_part(), other.primitive_part());
        if f.degree() < g.degree() {
            std::mem::swap(&mut f, &mut g);
        }
        while !g.is_zero() {
            let r = f.pseudo_remainder(&g).primitive_part();
            f = g;
            g = r;
        }
        f
    }

    /// Primitive squarefree part.
    pub fn squarefree_part(&self) -> Self {
        let p = self.primitive_part();
        if p.degree().unwrap_or(0) == 0 {
            return p;
        }
        let g = p.gcd(&p.derivative());
        p.div_exact(&g)
            .expect("a polynomial is divisible by its gcd with its derivative")
            .primitive_part()
    }

    pub fn eval_bigint(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Floating evaluation (Horner).
    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.to_f64()
            .iter()
            .rev()
            .fold(Complex64::zero(), |acc, &c| acc * x + c)
    }

    /// Coefficients rounded to double precision (may be infinite for huge
    /// coefficients; see [`ScaledPolynomial`](crate::roots::ScaledPolynomial)).
    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    /// Sum of absolute values of the coefficients.
    pub fn norm1(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }
}

impl Add for &UnivariatePolynomial {
    type Output = UnivariatePolynomial;
    fn add(self, rhs: Self) -> UnivariatePolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UnivariatePolynomial::from_coeffs(
            (0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect(),
        )
    }
}

impl Sub for &UnivariatePolynomial {
    type Output = UnivariatePolynomial;
    fn sub(self, rhs: Self) -> UnivariatePolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UnivariatePolynomial::from_coeffs(
            (0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect(),
        )
    }
}

impl Neg for &UnivariatePolynomial {
    type Output = UnivariatePolynomial;
    fn neg(self) -> UnivariatePolynomial {
        UnivariatePolynomial::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &UnivariatePolynomial {
    type Output = UnivariatePolynomial;
    fn mul(self, rhs: Self) -> UnivariatePolynomial {
        if self.is_zero() || rhs.is_zero() {
            return UnivariatePolynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in rhs.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    out[i + j] += x * y;
                }
            }
        }
        UnivariatePolynomial::from_coeffs(out)
    }
}

impl fmt::Display for UnivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
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
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "a")?,
                (1, false) => write!(f, "{mag}*a")?,
                (_, true) => write!(f, "a^{k}")?,
                (_, false) => write!(f, "{mag}*a^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_strips_trailing_zeros() {
        let p = UnivariatePolynomial::from_i64(&[1, 2, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert!(UnivariatePolynomial::from_i64(&[0, 0]).is_zero());
    }

    #[test]
    fn exact_division_and_remainder_detection() {
        // (a - 1)(a + 2) = a^2 + a - 2
        let p = UnivariatePolynomial::from_i64(&[-2, 1, 1]);
        let d = UnivariatePolynomial::from_i64(&[-1, 1]);
        assert_eq!(p.div_exact(&d), Some(UnivariatePolynomial::from_i64(&[2, 1])));
        assert_eq!(p.div_exact(&UnivariatePolynomial::from_i64(&[1, 1])), None);
    }

    #[test]
    fn primitive_part_and_display() {
        let p = UnivariatePolynomial::from_i64(&[8, 0, -18]);
        assert_eq!(p.primitive_part(), UnivariatePolynomial::from_i64(&[-4, 0, 9]));
        assert_eq!(p.primitive_part().to_string(), "9*a^2 - 4");
    }

    #[test]
    fn gcd_and_squarefree_part() {
        // (a - 1)^2 (a + 2) = a^3 - 3a + 2
        let p = UnivariatePolynomial::from_i64(&[2, -3, 0, 1]);
        assert_eq!(p.gcd(&p.derivative()), UnivariatePolynomial::from_i64(&[-1, 1]));
        assert_eq!(p.squarefree_part(), UnivariatePolynomial::from_i64(&[-2, 1, 1]));
        let q = UnivariatePolynomial::from_i64(&[-4, 0, 9]);
        assert_eq!(q.squarefree_part(), q);
        let coprime = UnivariatePolynomial::from_i64(&[1, 1]).gcd(&UnivariatePolynomial::from_i64(&[1, 2]));
        assert_eq!(coprime.degree(), Some(0));
    }
}
