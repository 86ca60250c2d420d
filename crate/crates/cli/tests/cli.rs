use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const THETA: f64 = std::f64::consts::FRAC_PI_3;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_adiabatica"))
}

fn write_config(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, body).unwrap();
    path
}

fn run(command: &str, config: &Path, extra: &[&str]) -> Output {
    bin().arg(command).arg("--config").arg(config).args(extra).output().unwrap()
}

fn rotating_config(omega: f64, steps: usize) -> String {
    format!(r#"{{"model": "rotating", "mu_B": 1.0, "theta": {THETA}, "omega": {omega}, "grid": {{"steps": {steps}}}}}"#)
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn criteria_in_slow_regime_reports_three_true_verdicts() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", &rotating_config(1e-3, 256));
    let report = json(&run("criteria", &cfg, &[]));
    let verdicts = &report["report"]["verdicts"];
    assert_eq!(verdicts["naive"], true);
    assert_eq!(verdicts["gap"], true);
    assert_eq!(verdicts["level"], true);
    assert!(report["report"]["r_naive"].as_f64().unwrap() < 1e-3);
}

#[test]
fn barred_model_fails_the_gap_criterion() {
    let dir = TempDir::new().unwrap();
    let body = format!(r#"{{"model": "ms-barred", "mu_B": 1.0, "theta": {THETA}, "omega": 0.001, "refine": 2, "grid": {{"steps": 256}}}}"#);
    let report = json(&run("criteria", &write_config(&dir, "b.json", &body), &[]));
    assert_eq!(report["report"]["verdicts"]["naive"], true);
    assert_eq!(report["report"]["verdicts"]["gap"], false);
}

#[test]
fn degenerate_denominator_is_written_as_inf() {
    let dir = TempDir::new().unwrap();
    let body = r#"{"model": "rotating", "mu_B": 1.0, "theta": 1.5707963267948966, "omega": 0.1,
                   "energy_offset": 1.05, "grid": {"steps": 64}}"#;
    let report = json(&run("criteria", &write_config(&dir, "d.json", body), &[]));
    assert_eq!(report["report"]["r_level"], "inf");
    assert_eq!(report["report"]["verdicts"]["level"], false);
}

#[test]
fn constant_axis_candidate_composes() {
    let dir = TempDir::new().unwrap();
    let body = r#"{"model": "ms-candidate", "tau": 1.0, "omega0": 12.566370614359172, "direction": "constant"}"#;
    let report = json(&run("composition-check", &write_config(&dir, "k.json", body), &[]));
    assert!(report["rows"][0][2].as_f64().unwrap() <= 1e-12);

    let rotating = r#"{"model": "ms-candidate", "tau": 1.0, "omega0": 12.566370614359172}"#;
    let report = json(&run("composition-check", &write_config(&dir, "r.json", rotating), &[]));
    assert!(report["rows"][0][2].as_f64().unwrap() > 0.1);
}

#[test]
fn sweep_is_monotone_between_the_limits() {
    let dir = TempDir::new().unwrap();
    let body = format!(r#"{{"theta": {THETA}, "sweep": {{"ratio_min": 1e-3, "ratio_max": 1e3, "points": 61}}}}"#);
    let out = run("sweep", &write_config(&dir, "s.json", &body), &["--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "ratio,alpha,geometric,geometric_wrapped,from_adiabatic,from_trivial");
    let rows: Vec<Vec<f64>> =
        lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 61);
    assert!(rows.windows(2).all(|w| w[1][2] > w[0][2] && (w[1][2] - w[0][2]) < 0.2));
    assert!(rows[0][4] < 5e-3 && rows[60][5] < 5e-3);
}

#[test]
fn validation_failures_exit_with_two_and_list_everything() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "v.json", r#"{"model": "rotating", "theta": 0, "grid": {"steps": 8}}"#);
    let out = run("criteria", &cfg, &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    assert!(err.contains("steps ≥ 16") && err.contains("theta in (0, π)") && err.contains("mu_B required"));
    assert!(out.stdout.is_empty());

    let unknown = write_config(&dir, "u.json", r#"{"model": "rotating", "flux": 2}"#);
    assert_eq!(run("criteria", &unknown, &[]).status.code(), Some(2));
    let garbage = write_config(&dir, "g.json", "not json");
    assert_eq!(run("criteria", &garbage, &[]).status.code(), Some(2));
}

#[test]
fn missing_config_file_exits_with_one() {
    let out = run("criteria", Path::new("/nonexistent/config.json"), &[]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(bin().arg("criteria").output().unwrap().status.code(), Some(2));
    assert_eq!(bin().arg("levitate").output().unwrap().status.code(), Some(2));
}

#[test]
fn help_documents_csv_columns() {
    let out = bin().args(["simulate", "--help"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("CSV columns: t, psi_0_re"));
}

#[test]
fn identical_config_gives_byte_identical_files() {
    let dir = TempDir::new().unwrap();
    let body = format!(
        r#"{{"model": "rotating", "mu_B": 1.0, "theta": {THETA}, "omega": 0.5, "seed": 7, "grid": {{"steps": 128}}}}"#
    );
    let cfg = write_config(&dir, "h.json", &body);
    let outputs: Vec<Vec<u8>> = (0..2)
        .map(|i| {
            let path = dir.path().join(format!("out{i}.json"));
            let out = run("holonomy", &cfg, &["--output", path.to_str().unwrap()]);
            assert!(out.status.success());
            fs::read(path).unwrap()
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
    let report: Value = serde_json::from_slice(&outputs[0]).unwrap();
    assert!(report["gauge_check_holonomy_deviation"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn every_command_emits_parseable_json() {
    let dir = TempDir::new().unwrap();
    let rot = write_config(&dir, "rot.json", &rotating_config(0.5, 64));
    let ms = write_config(&dir, "ms.json", r#"{"model": "ms-second", "tau": 1.0, "n": 2, "grid": {"steps": 256}}"#);
    let sweep = write_config(
        &dir,
        "sw.json",
        &format!(r#"{{"theta": {THETA}, "sweep": {{"ratio_min": 0.1, "ratio_max": 10, "points": 5}}}}"#),
    );
    for (command, cfg) in [
        ("simulate", &rot),
        ("criteria", &ms),
        ("holonomy", &ms),
        ("ms-probe", &rot),
        ("composition-check", &ms),
        ("sweep", &sweep),
    ] {
        let report = json(&run(command, cfg, &[]));
        assert_eq!(report["command"], command);
        if let Some(cols) = report["columns"].as_array() {
            for row in report["rows"].as_array().unwrap() {
                assert_eq!(row.as_array().unwrap().len(), cols.len());
            }
        }
    }
}

#[test]
fn simulate_csv_conserves_population() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "s.json", &rotating_config(0.5, 64));
    let out = run("simulate", &cfg, &["--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((f[5] + f[6] - 1.0).abs() < 1e-12);
    }
}
