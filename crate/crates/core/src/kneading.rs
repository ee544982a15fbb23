//! Kneading words of escape-locus parameters.
//!
//! For a map whose free critical point `-a` escapes, the sublevel set
//! `{g < g(-a)}` is the disjoint union of two Jordan domains: `D0`,
//! containing the periodic critical point `+a`, and `D1`, containing its
//! co-critical point `-2a`. The two meet only at `-a`, on the boundary.
//! Membership is decided on a square grid of the slightly smaller
//! sublevel set `{g < g(-a) - margin}`, whose two pieces are separated,
//! by labelling 4-connected components and checking which anchor each
//! piece contains.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dynamics::{below_level, exact_period, green, period_tolerance, CubicMap, DEFAULT_BUDGET, DEFAULT_TOL};
use crate::error::{Error, Result};

/// Binary itinerary `κ_1 … κ_n` of the periodic critical orbit; `κ_n = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KneadingWord {
    symbols: Vec<u8>,
}

impl KneadingWord {
    pub fn new(symbols: Vec<u8>) -> Result<Self> {
        if symbols.len() < 2 {
            return Err(Error::Domain("kneading words have length at least 2".into()));
        }
        if symbols.iter().any(|&s| s > 1) {
            return Err(Error::Domain("kneading symbols are 0 or 1".into()));
        }
        if *symbols.last().unwrap() != 0 {
            return Err(Error::Domain("the last kneading symbol is always 0".into()));
        }
        Ok(Self { symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    /// `κ_j` for `1 <= j <= n`.
    pub fn symbol(&self, j: usize) -> u8 {
        self.symbols[j - 1]
    }

    /// `1^{n-1} 0`.
    pub fn distinguished(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain("distinguished word needs n >= 2".into()));
        }
        let mut symbols = vec![1; n];
        symbols[n - 1] = 0;
        Self::new(symbols)
    }

    pub fn is_distinguished(&self) -> bool {
        self.symbols[..self.len() - 1].iter().all(|&s| s == 1)
    }

    /// The word with `κ_m` replaced by `1 - κ_m` (`1 <= m <= n - 1`): the
    /// effect of a twist along the orbit point `P^m(c)`.
    pub fn twist_flip(&self, m: usize) -> Result<Self> {
        let n = self.len();
        if m == 0 || m >= n {
            return Err(Error::Domain(format!(
                "flip position must lie in 1..={}, got {m}",
                n - 1
            )));
        }
        let mut symbols = self.symbols.clone();
        symbols[m - 1] ^= 1;
        Ok(Self { symbols })
    }

    /// Positions `m < n` with `κ_m = 0`, increasing; flipping them in order
    /// reaches the distinguished word.
    pub fn flip_path_to_distinguished(&self) -> Vec<usize> {
        self.symbols[..self.len() - 1]
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == 0)
            .map(|(i, _)| i + 1)
            .collect()
    }

    pub fn apply_flips(&self, flips: &[usize]) -> Result<Self> {
        flips.iter().try_fold(self.clone(), |w, &m| w.twist_flip(m))
    }
}

impl fmt::Display for KneadingWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for KneadingWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let symbols = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Parse(format!("invalid kneading symbol {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(symbols)
    }
}

impl Serialize for KneadingWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for KneadingWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn twist_flip(word: &KneadingWord, m: usize) -> Result<KneadingWord> {
    word.twist_flip(m)
}

pub fn distinguished_word(n: usize) -> Result<KneadingWord> {
    KneadingWord::distinguished(n)
}

pub fn flip_path_to_distinguished(word: &KneadingWord) -> Vec<usize> {
    word.flip_path_to_distinguished()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComponentLabel {
    D0,
    D1,
    Outside,
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KneadingSettings {
    /// Margin as a fraction of `g(-a)`.
    pub margin_fraction: f64,
    pub initial_resolution: usize,
    pub max_resolution: usize,
    pub budget: usize,
}

impl Default for KneadingSettings {
    fn default() -> Self {
        Self {
            margin_fraction: 0.1,
            initial_resolution: 512,
            max_resolution: 4096,
            budget: DEFAULT_BUDGET,
        }
    }
}

const UNSET: u32 = u32::MAX;

/// Component labelling of `{g < level}` on a square grid centred at 0.
pub struct SublevelGrid {
    map: CubicMap,
    level: f64,
    resolution: usize,
    half_width: f64,
    labels: Vec<u32>,
    label_d0: Option<u32>,
    label_d1: Option<u32>,
}

impl SublevelGrid {
    /// Builds the grid. The square is enlarged until no boundary cell lies
    /// in the sublevel set, so every component inside is complete.
    pub fn build(
        map: &CubicMap,
        level: f64,
        resolution: usize,
        must_contain: &[Complex64],
        budget: usize,
    ) -> Result<Self> {
        let resolution = resolution.max(8);
        let mut half_width = must_contain
            .iter()
            .chain([map.a, map.cocritical(), map.free_critical()].iter())
            .map(|z| z.re.abs().max(z.im.abs()))
            .fold(1e-9f64, f64::max)
            * 1.25;
        for _ in 0..12 {
            let mask = Self::mask(map, level, resolution, half_width, budget);
            let n = resolution;
            let touches = (0..n).any(|k| mask[k] || mask[(n - 1) * n + k] || mask[k * n] || mask[k * n + n - 1]);
            if !touches {
                return Ok(Self::label(*map, level, resolution, half_width, &mask));
            }
            half_width *= 2.0;
        }
        Err(Error::Internal(
            "sublevel set does not fit in any tested square".into(),
        ))
    }

    fn cell_center(resolution: usize, half_width: f64, ix: usize, iy: usize) -> Complex64 {
        let step = 2.0 * half_width / resolution as f64;
        Complex64::new(
            -half_width + (ix as f64 + 0.5) * step,
            -half_width + (iy as f64 + 0.5) * step,
        )
    }

    fn mask(map: &CubicMap, level: f64, resolution: usize, half_width: f64, budget: usize) -> Vec<bool> {
        (0..resolution)
            .into_par_iter()
            .flat_map_iter(|iy| {
                (0..resolution).map(move |ix| {
                    let z = Self::cell_center(resolution, half_width, ix, iy);
                    // undecided cells are left out of the set
                    below_level(map, z, level, budget).unwrap_or(false)
                })
            })
            .collect()
    }

    fn label(map: CubicMap, level: f64, resolution: usize, half_width: f64, mask: &[bool]) -> Self {
        let n = resolution;
        let mut labels = vec![UNSET; n * n];
        let mut next = 0u32;
        let mut queue = VecDeque::new();
        for start in 0..n * n {
            if !mask[start] || labels[start] != UNSET {
                continue;
            }
            labels[start] = next;
            queue.push_back(start);
            while let Some(k) = queue.pop_front() {
                let (x, y) = (k % n, k / n);
                let mut visit = |j: usize| {
                    if mask[j] && labels[j] == UNSET {
                        labels[j] = next;
                        queue.push_back(j);
                    }
                };
                if x > 0 {
                    visit(k - 1);
                }
                if x + 1 < n {
                    visit(k + 1);
                }
                if y > 0 {
                    visit(k - n);
                }
                if y + 1 < n {
                    visit(k + n);
                }
            }
            next += 1;
        }
        let mut grid = Self {
            map,
            level,
            resolution,
            half_width,
            labels,
            label_d0: None,
            label_d1: None,
        };
        grid.label_d0 = grid.cell_label(map.a);
        grid.label_d1 = grid.cell_label(map.cocritical());
        grid
    }

    fn cell_index(&self, z: Complex64) -> Option<usize> {
        let step = 2.0 * self.half_width / self.resolution as f64;
        let fx = ((z.re + self.half_width) / step).floor();
        let fy = ((z.im + self.half_width) / step).floor();
        let n = self.resolution as f64;
        if fx < 0.0 || fy < 0.0 || fx >= n || fy >= n {
            return None;
        }
        Some(fy as usize * self.resolution + fx as usize)
    }

    fn cell_label(&self, z: Complex64) -> Option<u32> {
        self.cell_index(z)
            .map(|k| self.labels[k])
            .filter(|&l| l != UNSET)
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Which piece of the sublevel set contains `w`.
    pub fn locate(&self, w: Complex64, budget: usize) -> Result<ComponentLabel> {
        if self.label_d0.is_some() && self.label_d0 == self.label_d1 {
            return Err(Error::Internal(format!(
                "anchors +a and -2a share a component at resolution {}",
                self.resolution
            )));
        }
        match self.cell_label(w) {
            Some(l) if Some(l) == self.label_d0 => Ok(ComponentLabel::D0),
            Some(l) if Some(l) == self.label_d1 => Ok(ComponentLabel::D1),
            Some(_) => Ok(ComponentLabel::Indeterminate),
            None => match below_level(&self.map, w, self.level, budget) {
                Some(false) => Ok(ComponentLabel::Outside),
                _ => Ok(ComponentLabel::Indeterminate),
            },
        }
    }
}

/// `g(-a)`, failing unless `-a` provably escapes.
fn escape_level(map: &CubicMap, budget: usize) -> Result<f64> {
    match green(map, map.free_critical(), DEFAULT_TOL, budget) {
        Ok(g) if !g.undetermined_possible && g.lower() > 0.0 => Ok(g.value),
        _ => Err(Error::Domain(
            "kneading data needs a map whose free critical point escapes".into(),
        )),
    }
}

/// Component of `w` in `{g < g(-a) - margin}` at one grid resolution.
pub fn locate_component(
    map: &CubicMap,
    w: Complex64,
    margin: f64,
    resolution: usize,
) -> Result<ComponentLabel> {
    if margin <= 0.0 {
        return Err(Error::Domain("margin must be positive".into()));
    }
    let level = escape_level(map, DEFAULT_BUDGET)? - margin;
    if level <= 0.0 {
        return Err(Error::Domain("margin exceeds g(-a)".into()));
    }
    let grid = SublevelGrid::build(map, level, resolution, &[w], DEFAULT_BUDGET)?;
    grid.locate(w, DEFAULT_BUDGET)
}

/// Kneading word of a period-`n` escape-locus map. The grid resolution is
/// doubled while any orbit point is indeterminate.
pub fn kneading_word(map: &CubicMap, n: usize, settings: &KneadingSettings) -> Result<KneadingWord> {
    kneading_word_at(map, n, settings).map(|(w, _)| w)
}

/// As [`kneading_word`], also returning the resolution that resolved it.
pub fn kneading_word_at(
    map: &CubicMap,
    n: usize,
    settings: &KneadingSettings,
) -> Result<(KneadingWord, usize)> {
    if n < 2 {
        return Err(Error::Domain("kneading words need n >= 2".into()));
    }
    match exact_period(map, n as u32, period_tolerance(map, n as u32)) {
        Ok(Some(p)) if p as usize == n => {}
        Ok(other) => {
            return Err(Error::Domain(format!(
                "marked critical point has period {other:?}, expected {n}"
            )))
        }
        Err(e) => return Err(e),
    }
    let g = escape_level(map, settings.budget)?;
    let level = g * (1.0 - settings.margin_fraction);
    let orbit = map
        .orbit(map.a, n)
        .map_err(|_| Error::Internal("periodic orbit overflowed".into()))?;
    let points = &orbit[1..];
    let mut resolution = settings.initial_resolution;
    loop {
        let grid = SublevelGrid::build(map, level, resolution, points, settings.budget)?;
        let mut symbols = Vec::with_capacity(n);
        let mut unresolved = None;
        for (j, &w) in points.iter().enumerate() {
            match grid.locate(w, settings.budget)? {
                ComponentLabel::D0 => symbols.push(0),
                ComponentLabel::D1 => symbols.push(1),
                ComponentLabel::Outside => {
                    return Err(Error::Internal(format!(
                        "critical orbit point {} lies outside the sublevel set",
                        j + 1
                    )))
                }
                ComponentLabel::Indeterminate => {
                    unresolved = Some(j + 1);
                    break;
                }
            }
        }
        match unresolved {
            None => {
                if symbols[n - 1] != 0 {
                    return Err(Error::Internal(
                        "P^n(c) = c was not placed in the critical piece".into(),
                    ));
                }
                return Ok((KneadingWord::new(symbols)?, resolution));
            }
            Some(index) if resolution * 2 > settings.max_resolution => {
                return Err(Error::KneadingUnresolved { index })
            }
            Some(_) => resolution *= 2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> KneadingWord {
        s.parse().unwrap()
    }

    #[test]
    fn word_invariants() {
        assert!("1".parse::<KneadingWord>().is_err());
        assert!("101".parse::<KneadingWord>().is_err());
        assert!("1020".parse::<KneadingWord>().is_err());
        assert_eq!(w("1110").to_string(), "1110");
    }

    #[test]
    fn flips() {
        assert_eq!(w("1000").twist_flip(1).unwrap(), w("0000"));
        assert_eq!(w("0000").twist_flip(3).unwrap(), w("0010"));
        let x = w("0110");
        assert_eq!(x.twist_flip(2).unwrap().twist_flip(2).unwrap(), x);
        assert!(x.twist_flip(4).is_err());
        assert!(x.twist_flip(0).is_err());
    }

    #[test]
    fn distinguished_words() {
        assert_eq!(KneadingWord::distinguished(2).unwrap(), w("10"));
        assert_eq!(KneadingWord::distinguished(4).unwrap(), w("1110"));
        for n in 2..=8 {
            let d = KneadingWord::distinguished(n).unwrap();
            assert_eq!(d.symbol(n), 0);
            assert!(d.is_distinguished());
        }
        assert!(KneadingWord::distinguished(1).is_err());
    }

    #[test]
    fn flip_paths() {
        assert_eq!(w("1000").flip_path_to_distinguished(), vec![2, 3]);
        assert_eq!(w("1000").apply_flips(&[2, 3]).unwrap(), w("1110"));
        assert!(w("10").flip_path_to_distinguished().is_empty());
        assert_eq!(w("0000").flip_path_to_distinguished(), vec![1, 2, 3]);
    }

    fn phi2_map(a: f64, sign: f64) -> CubicMap {
        // roots of v^2 + a v + 1 - 2a^2
        let disc = (9.0 * a * a - 4.0_f64).sqrt();
        CubicMap::new(Complex64::new(a, 0.0), Complex64::new((-a + sign * disc) / 2.0, 0.0))
    }

    #[test]
    fn anchors_locate_to_their_pieces() {
        let map = phi2_map(10.0, -1.0);
        let margin = 0.1 * green(&map, map.free_critical(), 1e-12, DEFAULT_BUDGET).unwrap().value;
        assert_eq!(locate_component(&map, map.a, margin, 256).unwrap(), ComponentLabel::D0);
        assert_eq!(
            locate_component(&map, map.cocritical(), margin, 256).unwrap(),
            ComponentLabel::D1
        );
        let far = Complex64::new(0.0, 100.0);
        assert_eq!(locate_component(&map, far, margin, 256).unwrap(), ComponentLabel::Outside);
    }

    #[test]
    fn period_two_words_at_large_a() {
        // v ≈ -2a sends c onto its co-critical point; v ≈ a nearly fixes c
        let s = KneadingSettings::default();
        let words: Vec<String> = [-1.0, 1.0]
            .iter()
            .map(|&sign| kneading_word(&phi2_map(10.0, sign), 2, &s).unwrap().to_string())
            .collect();
        assert_eq!(words, vec!["10", "00"]);
    }

    #[test]
    fn bounded_maps_are_rejected() {
        let map = CubicMap::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        assert!(locate_component(&map, Complex64::new(0.0, 0.0), 0.1, 64).is_err());
    }
}
