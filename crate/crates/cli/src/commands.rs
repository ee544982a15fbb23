use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use critorbit::atlas::{build_atlas, AtlasReport, Timings};
use critorbit::dynamics::{classify_escape, CubicMap, EscapeClass};
use critorbit::exactpoly::{
    build_phin, build_qn, dynatomic_product, expected_phin_degree_v, format_cache_file, read_cache_file, PhiCache,
};
use critorbit::kneading::kneading_word_at;
use critorbit::monodromy::{
    connected_components, fiber_at, fiber_values, involution_on_fiber, InvolutionPairing, MonodromyResult, PeriodCurve,
};
use critorbit::thurston::{enumerate_partitions, is_obstruction, leading_eigenvalue, transition_matrix, TransitionMatrix};
use critorbit::{Error, Result};

use crate::config::Config;

fn check_budget(n: u32, cfg: &Config) -> Result<()> {
    if n > cfg.budget {
        return Err(Error::DegreeBudget { n, limit: cfg.budget });
    }
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    Ok(())
}

fn check_monodromy_budget(n: u32, cfg: &Config) -> Result<()> {
    check_budget(n, cfg)?;
    if n > cfg.monodromy_budget {
        return Err(Error::DegreeBudget { n, limit: cfg.monodromy_budget });
    }
    Ok(())
}

fn cache_path(cfg: &Config, name: String) -> Option<PathBuf> {
    cfg.cache_dir.as_ref().map(|d| d.join(name))
}

fn write_cache(cfg: &Config, name: String, text: &str) -> Result<()> {
    if let Some(path) = cache_path(cfg, name) {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, text)?;
    }
    Ok(())
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Loads `Φ_n` from the cache directory when present, after checking its
/// header and degree, so later commands skip the exact construction.
fn load_cached_phin(n: u32, cfg: &Config) -> Result<()> {
    let Some(path) = cache_path(cfg, format!("phin_{n}.txt")) else {
        return Ok(());
    };
    if PhiCache::global().get(n).is_some() || !path.exists() {
        return Ok(());
    }
    let (m, p) = read_cache_file(&path)?;
    if m != n || i64::from(p.degree_v()) != expected_phin_degree_v(n) {
        return Err(Error::Parse(format!("{} does not hold Φ_{n}", path.display())));
    }
    PhiCache::global().insert(n, Arc::new(p))?;
    Ok(())
}

pub fn curve(n: u32, cfg: &Config) -> Result<PeriodCurve> {
    check_budget(n, cfg)?;
    load_cached_phin(n, cfg)?;
    PeriodCurve::new(n, cfg.budget)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSummary {
    pub n: u32,
    pub degree_v: u32,
    pub degree_a: u32,
    pub total_degree: u32,
    pub term_count: usize,
    pub symmetry_sign: Option<i32>,
    pub product_identity_verified: bool,
    pub cache_file: Option<String>,
}

pub fn cmd_curve(n: u32, cfg: &Config) -> Result<CurveSummary> {
    check_budget(n, cfg)?;
    let p = build_phin(n, cfg.budget)?;
    let verified = dynatomic_product(n, cfg.budget)? == build_qn(n, cfg.budget)?;
    if !verified {
        return Err(Error::Internal(format!("product of exact-period factors differs from Q_{n}")));
    }
    let name = format!("phin_{n}.txt");
    write_cache(cfg, name.clone(), &format_cache_file(n, &p))?;
    Ok(CurveSummary {
        n,
        degree_v: p.degree_v(),
        degree_a: p.degree_a(),
        total_degree: p.total_degree(),
        term_count: p.term_count(),
        symmetry_sign: p.involution_symmetry_sign().map(|s| s.as_i32()),
        product_identity_verified: verified,
        cache_file: cache_path(cfg, name).map(|p| p.display().to_string()),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentsReport {
    pub n: u32,
    pub monodromy: MonodromyResult,
    pub involution: InvolutionPairing,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

pub fn cmd_components(n: u32, cfg: &Config) -> Result<ComponentsReport> {
    let start = Instant::now();
    check_monodromy_budget(n, cfg)?;
    let curve = curve(n, cfg)?;
    let settings = cfg.atlas.monodromy;
    let monodromy = connected_components(&curve, &settings)?;
    let fiber = fiber_at(&curve, monodromy.base, settings.track.residual_tol)?;
    let involution = involution_on_fiber(&curve, &fiber, &monodromy.branch_points, &settings)?;
    let report = ComponentsReport {
        n,
        monodromy,
        involution,
        timings: cfg.timings.then(|| Timings {
            total_seconds: start.elapsed().as_secs_f64(),
        }),
    };
    write_cache(cfg, format!("monodromy_{n}.json"), &to_json(&report)?)?;
    Ok(report)
}

/// The components run for the current settings, from the cache when a
/// matching one is stored.
fn components_for(n: u32, cfg: &Config) -> Result<ComponentsReport> {
    check_monodromy_budget(n, cfg)?;
    if let Some(path) = cache_path(cfg, format!("monodromy_{n}.json")) {
        if let Ok(text) = std::fs::read_to_string(&path) {
            if let Ok(report) = serde_json::from_str::<ComponentsReport>(&text) {
                if report.n == n && report.monodromy.settings == cfg.atlas.monodromy {
                    return Ok(report);
                }
            }
        }
    }
    cmd_components(n, cfg)
}

pub fn cmd_atlas(n: u32, cfg: &Config) -> Result<AtlasReport> {
    let start = Instant::now();
    let components = components_for(n, cfg)?;
    let curve = curve(n, cfg)?;
    let mut report = build_atlas(
        &curve,
        &components.monodromy.branch_points,
        Some(components.monodromy.orbit_count),
        &cfg.atlas,
    )?;
    if cfg.timings {
        report.timings = Some(Timings {
            total_seconds: start.elapsed().as_secs_f64(),
        });
    }
    write_cache(cfg, format!("atlas_{n}.json"), &to_json(&report)?)?;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThurstonRow {
    pub partition: String,
    pub block_count: usize,
    pub matrix: TransitionMatrix,
    pub leading_eigenvalue: f64,
    /// `2^(-1/p)` for `p` blocks.
    pub expected: f64,
    pub obstruction: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThurstonReport {
    pub n: u32,
    pub rows: Vec<ThurstonRow>,
    pub max_deviation: f64,
    pub any_obstruction: bool,
}

pub fn cmd_thurston(n: u32) -> Result<ThurstonReport> {
    let rows = enumerate_partitions(n as usize)?
        .into_iter()
        .map(|part| {
            let matrix = transition_matrix(&part);
            let m = matrix.to_f64();
            let p = part.block_count();
            Ok(ThurstonRow {
                partition: part.to_string(),
                block_count: p,
                leading_eigenvalue: leading_eigenvalue(&m)?,
                expected: 2f64.powf(-1.0 / p as f64),
                obstruction: is_obstruction(&m)?,
                matrix,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ThurstonReport {
        n,
        max_deviation: rows
            .iter()
            .map(|r| (r.leading_eigenvalue - r.expected).abs())
            .fold(0.0, f64::max),
        any_obstruction: rows.iter().any(|r| r.obstruction),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KneadingEntry {
    pub v: Complex64,
    pub escape: EscapeClass,
    pub kneading: Option<String>,
    pub resolution: Option<usize>,
    pub flip_path: Option<Vec<usize>>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KneadingReport {
    pub n: u32,
    pub a: Complex64,
    pub entries: Vec<KneadingEntry>,
}

/// Kneading words at `(a, v)`, or at every `v` over `a` when `v` is absent.
pub fn cmd_kneading(n: u32, a: Complex64, v: Option<Complex64>, cfg: &Config) -> Result<KneadingReport> {
    let values = match v {
        Some(v) => vec![v],
        None => fiber_values(&curve(n, cfg)?, a)?,
    };
    let entries = values
        .into_iter()
        .map(|v| {
            let map = CubicMap::new(a, v);
            let escape = classify_escape(&map, cfg.atlas.escape_tol, cfg.atlas.escape_budget);
            let result = if escape == EscapeClass::EscapeLocus {
                kneading_word_at(&map, n as usize, &cfg.atlas.kneading).map(Some)
            } else {
                Ok(None)
            };
            match result {
                Ok(found) => KneadingEntry {
                    v,
                    escape,
                    kneading: found.as_ref().map(|(w, _)| w.to_string()),
                    resolution: found.as_ref().map(|&(_, r)| r),
                    flip_path: found.as_ref().map(|(w, _)| w.flip_path_to_distinguished()),
                    error: None,
                },
                Err(e) => KneadingEntry {
                    v,
                    escape,
                    kneading: None,
                    resolution: None,
                    flip_path: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(KneadingReport { n, a, entries })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsolidatedReport {
    pub curve: CurveSummary,
    pub components: ComponentsReport,
    pub atlas: AtlasReport,
    pub thurston: ThurstonReport,
    pub plot_files: Vec<String>,
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn write_csv<R: Serialize>(path: &Path, rows: impl IntoIterator<Item = R>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    for row in rows {
        w.serialize(row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct BranchPointRow {
    index: usize,
    re: f64,
    im: f64,
    modulus: f64,
    residual: f64,
}

#[derive(Serialize)]
struct RegionRow {
    region_id: usize,
    cycle_length: usize,
    a_re: f64,
    a_im: f64,
    v_re: f64,
    v_im: f64,
    kneading: String,
    flip_path: String,
}

#[derive(Serialize)]
struct SampleRow {
    region_id: usize,
    label: usize,
    vertex: usize,
    a_re: f64,
    a_im: f64,
    v_re: f64,
    v_im: f64,
    kneading: String,
}

fn word_or_blank(w: Option<&impl ToString>) -> String {
    w.map(ToString::to_string).unwrap_or_default()
}

/// Runs every pipeline for `n` and writes `report_<n>.json` plus the CSV
/// plot tables into `out`.
pub fn cmd_report(n: u32, cfg: &Config, out: &Path) -> Result<ConsolidatedReport> {
    let curve_summary = cmd_curve(n, cfg)?;
    let components = components_for(n, cfg)?;
    let atlas = cmd_atlas(n, cfg)?;
    let thurston = cmd_thurston(n)?;
    std::fs::create_dir_all(out)?;

    let names = [
        format!("branch_points_{n}.csv"),
        format!("regions_{n}.csv"),
        format!("samples_{n}.csv"),
    ];
    write_csv(
        &out.join(&names[0]),
        components.monodromy.branch_points.iter().enumerate().map(|(index, b)| BranchPointRow {
            index,
            re: b.value.re,
            im: b.value.im,
            modulus: b.value.norm(),
            residual: b.residual,
        }),
    )?;
    write_csv(
        &out.join(&names[1]),
        atlas.regions.iter().map(|r| RegionRow {
            region_id: r.region_id,
            cycle_length: r.cycle_length,
            a_re: r.representative.0.re,
            a_im: r.representative.0.im,
            v_re: r.representative.1.re,
            v_im: r.representative.1.im,
            kneading: word_or_blank(r.kneading.as_ref()),
            flip_path: r
                .flip_path
                .as_ref()
                .map(|p| p.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "))
                .unwrap_or_default(),
        }),
    )?;
    write_csv(
        &out.join(&names[2]),
        atlas.regions.iter().flat_map(|r| {
            r.samples.iter().map(move |s| SampleRow {
                region_id: r.region_id,
                label: s.label,
                vertex: s.vertex,
                a_re: s.a.re,
                a_im: s.a.im,
                v_re: s.v.re,
                v_im: s.v.im,
                kneading: word_or_blank(s.kneading.as_ref()),
            })
        }),
    )?;

    let report = ConsolidatedReport {
        curve: curve_summary,
        components,
        atlas,
        thurston,
        plot_files: names.to_vec(),
    };
    std::fs::write(out.join(format!("report_{n}.json")), to_json(&report)?)?;
    Ok(report)
}
