//! Transition matrices of cyclic multicurves on the periodic critical orbit
//! and Perron eigenvalues of nonnegative matrices.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Eigenvalues at or above `1 - OBSTRUCTION_SLACK` count as obstructions.
pub const OBSTRUCTION_SLACK: f64 = 1e-9;

/// Partition of the orbit indices `0..n` into `p` blocks
/// `{k : k ≡ i - critical (mod p)}`, so the shift `k ↦ k + 1` carries
/// block `i` onto block `i + 1 (mod p)` and index 0 lies in `critical`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CyclicBlockPartition {
    n: usize,
    p: usize,
    critical: usize,
}

impl CyclicBlockPartition {
    pub fn new(n: usize, p: usize, critical: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain("period must be at least 2".into()));
        }
        if p == 0 || !n.is_multiple_of(p) || n / p < 2 {
            return Err(Error::Domain(format!(
                "{p} blocks do not partition a {n}-cycle into blocks of size >= 2"
            )));
        }
        if critical >= p {
            return Err(Error::Domain(format!("critical block {critical} out of range")));
        }
        Ok(Self { n, p, critical })
    }

    pub fn period(&self) -> usize {
        self.n
    }

    pub fn block_count(&self) -> usize {
        self.p
    }

    pub fn critical_block(&self) -> usize {
        self.critical
    }

    pub fn block_of(&self, k: usize) -> usize {
        (k + self.critical) % self.p
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.p];
        for k in 0..self.n {
            blocks[self.block_of(k)].push(k);
        }
        blocks
    }
}

impl fmt::Display for CyclicBlockPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} p={} critical={}", self.n, self.p, self.critical)
    }
}

impl FromStr for CyclicBlockPartition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut fields = [None; 3];
        for token in s.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {token:?}")))?;
            let slot = match key {
                "n" => 0,
                "p" => 1,
                "critical" => 2,
                _ => return Err(Error::Parse(format!("unknown partition field {key:?}"))),
            };
            let value: usize = value
                .parse()
                .map_err(|_| Error::Parse(format!("bad value for {key}: {value:?}")))?;
            if fields[slot].replace(value).is_some() {
                return Err(Error::Parse(format!("duplicate field {key}")));
            }
        }
        match fields {
            [Some(n), Some(p), Some(c)] => Self::new(n, p, c),
            _ => Err(Error::Parse(format!("incomplete partition {s:?}"))),
        }
    }
}

impl Serialize for CyclicBlockPartition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CyclicBlockPartition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// One canonical partition (critical block 0) per `p | n` with `n / p >= 2`.
pub fn enumerate_partitions(n: usize) -> Result<Vec<CyclicBlockPartition>> {
    if n < 2 {
        return Err(Error::Domain("period must be at least 2".into()));
    }
    (1..=n / 2)
        .filter(|p| n.is_multiple_of(*p))
        .map(|p| CyclicBlockPartition::new(n, p, 0))
        .collect()
}

/// Square matrix of nonnegative rationals, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionMatrix {
    dim: usize,
    entries: Vec<Rational64>,
}

impl TransitionMatrix {
    pub fn new(dim: usize, entries: Vec<Rational64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::Domain(format!(
                "{} entries do not fill a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        if entries.iter().any(|e| *e < Rational64::zero()) {
            return Err(Error::Domain("transition matrices are nonnegative".into()));
        }
        Ok(Self { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> Rational64 {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[Rational64] {
        &self.entries
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| self.entry(i, j).to_f64().unwrap_or(f64::NAN))
                    .collect()
            })
            .collect()
    }
}

impl Serialize for TransitionMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.entry(i, j).to_string()).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TransitionMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in &rows {
            if row.len() != dim {
                return Err(serde::de::Error::custom("matrix is not square"));
            }
            for e in row {
                entries.push(e.parse::<Rational64>().map_err(serde::de::Error::custom)?);
            }
        }
        TransitionMatrix::new(dim, entries).map_err(serde::de::Error::custom)
    }
}

/// `a_{i,i+1} = 1/2` out of the critical block, 1 for the other blocks.
pub fn transition_matrix(part: &CyclicBlockPartition) -> TransitionMatrix {
    let p = part.block_count();
    let mut entries = vec![Rational64::zero(); p * p];
    for i in 0..p {
        entries[i * p + (i + 1) % p] = if i == part.critical_block() {
            Rational64::new(1, 2)
        } else {
            Rational64::from_integer(1)
        };
    }
    TransitionMatrix { dim: p, entries }
}

/// Spectral radius of a nonnegative square matrix: the maximum over the
/// strongly connected diagonal blocks of their Perron roots.
pub fn leading_eigenvalue(m: &[Vec<f64>]) -> Result<f64> {
    let dim = m.len();
    if m.iter().any(|row| row.len() != dim) {
        return Err(Error::Domain("matrix is not square".into()));
    }
    if m.iter().flatten().any(|x| !(*x >= 0.0) || !x.is_finite()) {
        return Err(Error::Domain("matrix must be finite and nonnegative".into()));
    }
    let mut best = 0.0f64;
    for block in strongly_connected_components(m) {
        let sub: Vec<Vec<f64>> = block
            .iter()
            .map(|&i| block.iter().map(|&j| m[i][j]).collect())
            .collect();
        best = best.max(perron_root(&sub));
    }
    Ok(best)
}

pub fn obstruction_check(part: &CyclicBlockPartition) -> bool {
    is_obstruction(&transition_matrix(part).to_f64()).unwrap_or(false)
}

/// `λ >= 1 - OBSTRUCTION_SLACK` for an arbitrary nonnegative matrix.
pub fn is_obstruction(m: &[Vec<f64>]) -> Result<bool> {
    Ok(leading_eigenvalue(m)? >= 1.0 - OBSTRUCTION_SLACK)
}

fn strongly_connected_components(m: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let n = m.len();
    let mut reach: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| i == j || m[i][j] > 0.0).collect())
        .collect();
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    let mut assigned = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        let block: Vec<usize> = (i..n).filter(|&j| reach[i][j] && reach[j][i]).collect();
        for &j in &block {
            assigned[j] = true;
        }
        out.push(block);
    }
    out
}

/// Perron root of an irreducible block. Iterates on `M + sI`, which is
/// primitive, with a Rayleigh-quotient stopping rule and a
/// Collatz–Wielandt bracket as the returned estimate.
fn perron_root(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    let s = m
        .iter()
        .map(|row| row.iter().sum::<f64>())
        .fold(0.0, f64::max);
    if s == 0.0 {
        return 0.0;
    }
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut last_q = f64::NAN;
    let mut estimate = s;
    for _ in 0..1_000_000 {
        let y: Vec<f64> = (0..n)
            .map(|i| s * x[i] + (0..n).map(|j| m[i][j] * x[j]).sum::<f64>())
            .collect();
        let q = x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>();
        let (lo, hi) = x.iter().zip(&y).fold((f64::INFINITY, 0.0f64), |(lo, hi), (a, b)| {
            let r = b / a;
            (lo.min(r), hi.max(r))
        });
        estimate = 0.5 * (lo + hi);
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        x = y.into_iter().map(|v| v / norm).collect();
        let settled = ((q - last_q) / q).abs() < 1e-12;
        if settled && hi - lo <= 1e-12 * hi {
            break;
        }
        last_q = q;
    }
    (estimate - s).max(0.0)
}
