use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use critorbit::atlas::AtlasReport;
use critorbit_cli::commands::{ComponentsReport, ConsolidatedReport, CurveSummary};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_critorbit")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn curve_summaries_for_small_periods() {
    let two: CurveSummary = serde_json::from_str(&stdout(&run(&["curve", "2"]))).unwrap();
    assert_eq!(two.degree_v, 2);
    assert_eq!(two.symmetry_sign, Some(1));
    assert!(two.product_identity_verified);
    let one: CurveSummary = serde_json::from_str(&stdout(&run(&["curve", "1"]))).unwrap();
    assert_eq!(one.degree_v, 1);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["curve", "9"]).status.code(), Some(2));
    assert_eq!(run(&["--budget", "3", "curve", "4"]).status.code(), Some(2));
    assert_eq!(run(&["components", "6"]).status.code(), Some(2));
    assert_eq!(run(&["atlas", "6"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["kneading", "2", "--a", "one"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_file_is_applied_before_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# smaller budget\nbudget = 3\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    assert_eq!(run(&["--config", cfg, "curve", "4"]).status.code(), Some(2));
    assert!(run(&["--config", cfg, "--budget", "4", "curve", "4"]).status.success());
    std::fs::write(dir.path().join("bad.conf"), "colour = red\n").unwrap();
    let bad = dir.path().join("bad.conf");
    assert_eq!(run(&["--config", bad.to_str().unwrap(), "curve", "2"]).status.code(), Some(1));
}

#[test]
fn cache_directory_receives_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    stdout(&run(&["--cache-dir", cache, "curve", "2"]));
    let components = stdout(&run(&["--cache-dir", cache, "components", "2"]));
    stdout(&run(&["--cache-dir", cache, "atlas", "2"]));
    for name in ["phin_2.txt", "monodromy_2.json", "atlas_2.json"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    assert!(std::fs::read_to_string(dir.path().join("phin_2.txt")).unwrap().starts_with("PHIN n=2 degv=2\n"));
    let parsed: ComponentsReport = serde_json::from_str(&components).unwrap();
    assert_eq!(parsed.monodromy.orbit_count, 1);
    // a second run reads the cached curve and agrees
    assert_eq!(stdout(&run(&["--cache-dir", cache, "components", "2"])), components);
}

#[test]
fn corrupt_cache_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("phin_2.txt"), "PHIN n=3 degv=8\n").unwrap();
    let cache = dir.path().to_str().unwrap();
    assert_eq!(run(&["--cache-dir", cache, "components", "2"]).status.code(), Some(1));
    // `curve` rebuilds and overwrites the cache file
    stdout(&run(&["--cache-dir", cache, "curve", "2"]));
    stdout(&run(&["--cache-dir", cache, "components", "2"]));
}

fn csv_rows(path: &Path) -> usize {
    csv::Reader::from_path(path).unwrap().records().count()
}

#[test]
fn report_writes_json_and_plot_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r");
    let text = stdout(&run(&["report", "2", "--out", out.to_str().unwrap()]));
    let report: ConsolidatedReport = serde_json::from_str(&text).unwrap();
    assert_eq!(std::fs::read_to_string(out.join("report_2.json")).unwrap(), text);
    assert_eq!(csv_rows(&out.join("samples_2.csv")), report.atlas.sample_count());
    assert_eq!(csv_rows(&out.join("regions_2.csv")), report.atlas.region_count);
    assert_eq!(csv_rows(&out.join("branch_points_2.csv")), report.components.monodromy.branch_points.len());
    assert_eq!(serde_json::to_string_pretty(&report).unwrap() + "\n", text);
}

#[test]
fn atlas_json_round_trips_and_uses_pairs_for_complex_numbers() {
    let text = stdout(&run(&["atlas", "2"]));
    let report: AtlasReport = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&report).unwrap() + "\n", text);
    let raw: Value = serde_json::from_str(&text).unwrap();
    let a = &raw["regions"][0]["representative"][0];
    assert!(a.as_array().is_some_and(|p| p.len() == 2 && p.iter().all(Value::is_f64)));
    assert!(raw.get("timings").is_none());
}

#[test]
fn kneading_and_thurston_commands() {
    let k: Value = serde_json::from_str(&stdout(&run(&["kneading", "2", "--a", "10"]))).unwrap();
    let mut words: Vec<&str> = k["entries"].as_array().unwrap().iter().map(|e| e["kneading"].as_str().unwrap()).collect();
    words.sort();
    assert_eq!(words, ["00", "10"]);
    let t: Value = serde_json::from_str(&stdout(&run(&["thurston", "6"]))).unwrap();
    assert_eq!(t["rows"].as_array().unwrap().len(), 3);
    assert_eq!(t["any_obstruction"], Value::Bool(false));
}
