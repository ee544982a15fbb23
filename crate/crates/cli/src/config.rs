//! `key = value` configuration, one pair per line; `#` starts a comment.
//!
//! ```text
//! seed = 7
//! tol = 1e-8
//! radius_factor = 4
//! ```

use std::path::{Path, PathBuf};
use std::str::FromStr;

use critorbit::atlas::AtlasSettings;
use critorbit::exactpoly::DEFAULT_DEGREE_BUDGET;
use critorbit::monodromy::DEFAULT_MONODROMY_BUDGET;
use critorbit::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub budget: u32,
    /// Largest period for `components`, `atlas` and `report`.
    pub monodromy_budget: u32,
    pub cache_dir: Option<PathBuf>,
    pub timings: bool,
    pub atlas: AtlasSettings,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            budget: DEFAULT_DEGREE_BUDGET,
            monodromy_budget: DEFAULT_MONODROMY_BUDGET,
            cache_dir: None,
            timings: false,
            atlas: AtlasSettings::default(),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Parse(format!("bad value {value:?} for {key}")))
}

pub const KEYS: &[&str] = &[
    "seed",
    "tol",
    "budget",
    "monodromy_budget",
    "cache_dir",
    "timings",
    "separation_fraction",
    "max_newton",
    "min_step",
    "circle_vertices",
    "radius_fraction",
    "merge_tol",
    "base_radius_factor",
    "max_base_draws",
    "margin_fraction",
    "initial_resolution",
    "max_resolution",
    "kneading_budget",
    "radius",
    "radius_factor",
    "max_radius_doublings",
    "samples_per_label",
    "escape_tol",
    "escape_budget",
    "ode_tol",
];

impl Config {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let a = &mut self.atlas;
        let m = &mut a.monodromy;
        match key {
            "seed" => m.seed = parse(key, value)?,
            "tol" => m.track.residual_tol = parse(key, value)?,
            "budget" => self.budget = parse(key, value)?,
            "monodromy_budget" => self.monodromy_budget = parse(key, value)?,
            "cache_dir" => self.cache_dir = Some(PathBuf::from(value)),
            "timings" => self.timings = parse(key, value)?,
            "separation_fraction" => m.track.separation_fraction = parse(key, value)?,
            "max_newton" => m.track.max_newton = parse(key, value)?,
            "min_step" => m.track.min_step = parse(key, value)?,
            "circle_vertices" => m.circle_vertices = parse(key, value)?,
            "radius_fraction" => m.radius_fraction = parse(key, value)?,
            "merge_tol" => m.merge_tol = parse(key, value)?,
            "base_radius_factor" => m.base_radius_factor = parse(key, value)?,
            "max_base_draws" => m.max_base_draws = parse(key, value)?,
            "margin_fraction" => a.kneading.margin_fraction = parse(key, value)?,
            "initial_resolution" => a.kneading.initial_resolution = parse(key, value)?,
            "max_resolution" => a.kneading.max_resolution = parse(key, value)?,
            "kneading_budget" => a.kneading.budget = parse(key, value)?,
            "radius" => a.radius = Some(parse(key, value)?),
            "radius_factor" => a.radius_factor = parse(key, value)?,
            "max_radius_doublings" => a.max_radius_doublings = parse(key, value)?,
            "samples_per_label" => a.samples_per_label = parse(key, value)?,
            "escape_tol" => a.escape_tol = parse(key, value)?,
            "escape_budget" => a.escape_budget = parse(key, value)?,
            "ode_tol" => a.ode_tol = parse(key, value)?,
            _ => return Err(Error::Parse(format!("unknown configuration key {key:?}"))),
        }
        Ok(())
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", lineno + 1)))?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        self.apply_text(&std::fs::read_to_string(path)?)
    }

    pub fn seed(&self) -> u64 {
        self.atlas.monodromy.seed
    }
}
