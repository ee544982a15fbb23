//! Word-size prime-field arithmetic backing the multi-modular resultant.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

#[derive(Clone, Copy, Debug)]
pub struct Zp {
    p: u64,
}

impl Zp {
    pub fn new(p: u64) -> Self {
        debug_assert!(p > 2 && p < (1 << 63));
        Self { p }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn add(&self, x: u64, y: u64) -> u64 {
        let s = x + y;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, x: u64, y: u64) -> u64 {
        if x >= y {
            x - y
        } else {
            x + self.p - y
        }
    }

    #[inline]
    pub fn neg(&self, x: u64) -> u64 {
        if x == 0 {
            0
        } else {
            self.p - x
        }
    }

    #[inline]
    pub fn mul(&self, x: u64, y: u64) -> u64 {
        ((x as u128 * y as u128) % self.p as u128) as u64
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Inverse by Fermat; `x` must be nonzero.
    pub fn inv(&self, x: u64) -> u64 {
        debug_assert!(x != 0);
        self.pow(x, self.p - 2)
    }

    pub fn from_i64(&self, x: i64) -> u64 {
        let r = (x as i128).rem_euclid(self.p as i128);
        r as u64
    }
}

pub fn bigint_mod(c: &BigInt, p: u64) -> u64 {
    let r = c.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits in u64")
}

fn mul_mod_u64(x: u64, y: u64, m: u64) -> u64 {
    ((x as u128 * y as u128) % m as u128) as u64
}

fn pow_mod_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod_u64(acc, b, m);
        }
        b = mul_mod_u64(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &b in &BASES {
        let mut x = pow_mod_u64(b, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes just below 2^62, in decreasing order.
pub fn primes_below_2_62() -> impl Iterator<Item = u64> {
    let mut candidate = (1u64 << 62) - 1;
    std::iter::from_fn(move || {
        while candidate > 3 {
            let c = candidate;
            candidate -= 2;
            if is_prime_u64(c) {
                return Some(c);
            }
        }
        None
    })
}

/// Incremental Chinese remaindering of a vector of residues.
#[derive(Clone, Debug)]
pub struct CrtAccumulator {
    modulus: BigInt,
    values: Vec<BigInt>,
}

impl CrtAccumulator {
    pub fn new(len: usize) -> Self {
        Self {
            modulus: BigInt::from(1),
            values: vec![BigInt::zero(); len],
        }
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    /// Folds in residues modulo a new prime `p` coprime to the current modulus.
    pub fn push(&mut self, residues: &[u64], p: u64) {
        assert_eq!(residues.len(), self.values.len());
        let zp = Zp::new(p);
        let m_mod_p = bigint_mod(&self.modulus, p);
        let m_inv = zp.inv(m_mod_p);
        for (value, &r) in self.values.iter_mut().zip(residues) {
            // value + M·t ≡ r (mod p)
            let cur = bigint_mod(value, p);
            let t = zp.mul(zp.sub(r, cur), m_inv);
            if t != 0 {
                *value += &self.modulus * BigInt::from(t);
            }
        }
        self.modulus *= BigInt::from(p);
    }

    /// Symmetric representatives in `(-M/2, M/2]`.
    pub fn symmetric(&self) -> Vec<BigInt> {
        let half = &self.modulus >> 1;
        self.values
            .iter()
            .map(|v| {
                if v > &half {
                    v - &self.modulus
                } else {
                    v.clone()
                }
            })
            .collect()
    }
}

/// Number of bits needed to hold `|x|`, with zero mapped to 0.
pub fn bit_length(x: &BigInt) -> u64 {
    if x.sign() == Sign::NoSign {
        0
    } else {
        x.bits()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn miller_rabin_agrees_with_trial_division() {
        for n in 0u64..2000 {
            let naive = n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
            assert_eq!(is_prime_u64(n), naive, "n = {n}");
        }
        // Carmichael numbers
        for c in [561u64, 1105, 1729, 2465, 2821, 6601, 8911] {
            assert!(!is_prime_u64(c));
        }
    }

    #[test]
    fn crt_recovers_negative_values() {
        let targets = [BigInt::from(-123456789012345678i64) * 1000, BigInt::from(42)];
        let mut acc = CrtAccumulator::new(2);
        for p in primes_below_2_62().take(3) {
            let residues: Vec<u64> = targets.iter().map(|t| bigint_mod(t, p)).collect();
            acc.push(&residues, p);
        }
        assert_eq!(acc.symmetric(), targets.to_vec());
    }
}
