use std::path::Path;
use std::process::Command;

use noma_mimo::experiment::{emit_outputs, Config, ExperimentResult, ExperimentSpec, Format, Overrides, SWEEP_HEADER};

const BIN: &str = env!("CARGO_BIN_EXE_noma-sim");

const SCENARIO: &str = r#"
[scenario]
M = 10
K = 2
T = 200
beta_g = 100.0
beta_h = 1.0
"#;

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("config.toml");
    std::fs::write(&path, format!("{SCENARIO}{body}")).unwrap();
    path
}

fn run(args: &[&str], workers: &str) -> std::process::Output {
    Command::new(BIN).args(args).env("NOMA_WORKERS", workers).output().unwrap()
}

fn error_kind(out: &Path) -> String {
    let text = std::fs::read_to_string(out.join("error.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["error"].as_str().unwrap().to_string()
}

#[test]
fn missing_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&["region", "--config", "/does/not/exist.toml", "--out", out.to_str().unwrap()], "1");
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_kind(&out), "config");
    let stderr: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(stderr["exit_code"], 2);
}

#[test]
fn invalid_scenario_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[scenario]\nM = 10\nK = 3\nT = 200\nbeta_g = 1.0\nbeta_h = 1.0\n").unwrap();
    let out = dir.path().join("out");
    let o = run(&["region", "--config", path.to_str().unwrap(), "--out", out.to_str().unwrap()], "1");
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_worker_count_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let out = dir.path().join("out");
    let o = run(&["validate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], "zero");
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn validate_passes_at_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[mc]\ntrials = 200000\nbase_seed = 3\n");
    let out = dir.path().join("out");
    let o = run(&["validate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], "2");
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("validate.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn too_few_trials_fail_validation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let out = dir.path().join("out");
    let o = run(&["validate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--trials", "8"], "1");
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(error_kind(&out), "validation");
    assert!(out.join("validate.csv").exists());
}

#[test]
fn unreachable_target_is_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    // Scheme-N restricted to equal pilot weights cannot serve the edge user
    // as well as Scheme-O does.
    let cfg = write_config(
        dir.path(),
        "[grid]\nalpha_g = [1.0]\nsplit_levels = 5\n[experiment]\ncommand = \"sweep-m\"\nregime = \"no_csir\"\nvalues = [10]\n",
    );
    let out = dir.path().join("out");
    let o = run(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], "1");
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(error_kind(&out), "infeasible");
    let csv = std::fs::read_to_string(out.join("sweep_m.csv")).unwrap();
    assert!(csv.contains("10,N,,"));
}

#[test]
fn region_csv_schema_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[experiment]\nregimes = [\"no_csir\"]\n");
    let out = dir.path().join("out");
    let o = run(
        &["region", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--prelog", "omit", "--format", "csv,json,plot"],
        "1",
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("region_no_csir_N.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("R_edge,R_center,scheme,regime,is_hull_vertex"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows.iter().any(|r| r.ends_with(",N,no_csir,true")));
    assert!(rows.iter().any(|r| r.ends_with(",N,no_csir,false")));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("region.json")).unwrap()).unwrap();
    assert_eq!(json["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(json["scenario"]["prelog_mode"], "omit");
    assert_eq!(json["seed"], 1);
    let hull = std::fs::read_to_string(out.join("region_no_csir_O_hull.dat")).unwrap();
    assert!(hull.lines().skip(1).all(|l| l.split(' ').filter_map(|x| x.parse::<f64>().ok()).count() == 2));
}

#[test]
fn empty_sweep_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let config = Config::from_toml(SCENARIO).unwrap();
    let ov = Overrides { command: Some(noma_mimo::experiment::Command::SweepM), ..Overrides::default() };
    let spec = ExperimentSpec::from_config(config, dir.path().to_path_buf(), vec![Format::Csv], &ov).unwrap();
    let files = emit_outputs(&spec, &ExperimentResult::Sweep(Vec::new())).unwrap();
    let text = std::fs::read_to_string(&files[0]).unwrap();
    assert_eq!(text, format!("{}\n", SWEEP_HEADER.join(",")));
}
