use num_complex::Complex64;

use crate::exactpoly::{divisors, mobius};

/// `Φ_n = Π_{d | n} Q_d^{μ(n/d)}` evaluated through the critical orbit
/// `z_0 = a, z_{k+1} = P(z_k)`, where `Q_d = z_d - a`. Avoids the
/// cancellation of the expanded coefficients.
#[derive(Clone, Debug)]
pub struct PeriodEquation {
    n: u32,
    factors: Vec<(u32, i64)>,
}

impl PeriodEquation {
    pub fn new(n: u32) -> Self {
        let factors = divisors(n)
            .into_iter()
            .map(|d| (d, mobius(n / d)))
            .filter(|&(_, m)| m != 0)
            .collect();
        Self { n, factors }
    }

    /// `Q_d` and `∂_v Q_d` for `d = 1..=n`.
    fn orbit(&self, a: Complex64, v: Complex64) -> Vec<(Complex64, Complex64)> {
        let a2 = a * a;
        let b = a2 * a * 2.0 + v;
        let mut z = a;
        let mut dz = Complex64::new(0.0, 0.0);
        let mut out = Vec::with_capacity(self.n as usize);
        for _ in 0..self.n {
            dz = (z * z - a2) * 3.0 * dz + 1.0;
            z = z * (z * z - a2 * 3.0) + b;
            out.push((z - a, dz));
        }
        out
    }

    /// `Φ_n / ∂_v Φ_n`, the Newton correction in `v`.
    pub fn newton_ratio(&self, a: Complex64, v: Complex64) -> Complex64 {
        let orbit = self.orbit(a, v);
        let log_derivative: Complex64 = self
            .factors
            .iter()
            .map(|&(d, m)| {
                let (q, dq) = orbit[d as usize - 1];
                dq / q * m as f64
            })
            .sum();
        log_derivative.inv()
    }

    /// `dv/da = -∂_a Φ_n / ∂_v Φ_n` along the curve. Both log-derivatives
    /// are multiplied by `Q_n`, which vanishes on the curve.
    pub fn tangent(&self, a: Complex64, v: Complex64) -> Complex64 {
        let a2 = a * a;
        let b = a2 * a * 2.0 + v;
        let mut z = a;
        let mut dv = Complex64::new(0.0, 0.0);
        let mut da = Complex64::new(1.0, 0.0);
        let mut orbit = Vec::with_capacity(self.n as usize);
        for _ in 0..self.n {
            let slope = (z * z - a2) * 3.0;
            dv = slope * dv + 1.0;
            da = slope * da - a * z * 6.0 + a2 * 6.0;
            z = z * (z * z - a2 * 3.0) + b;
            orbit.push((z - a, dv, da - 1.0));
        }
        let (qn, mut by_v, mut by_a) = orbit[self.n as usize - 1];
        for &(d, m) in self.factors.iter().filter(|&&(d, _)| d < self.n) {
            let (q, qv, qa) = orbit[d as usize - 1];
            by_v += qn * qv / q * m as f64;
            by_a += qn * qa / q * m as f64;
        }
        -by_a / by_v
    }

    pub fn value(&self, a: Complex64, v: Complex64) -> Complex64 {
        let orbit = self.orbit(a, v);
        self.factors
            .iter()
            .map(|&(d, m)| orbit[d as usize - 1].0.powi(m as i32))
            .product()
    }
}
