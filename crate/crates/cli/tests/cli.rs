use std::path::Path;
use std::process::{Command, Output};

fn colotame(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_colotame"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn with_config(text: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.cfg"), text).unwrap();
    dir
}

fn report_value(path: &Path, key: &str) -> String {
    let text = std::fs::read_to_string(path).unwrap();
    let prefix = format!("{key}: ");
    text.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap()
        .to_string()
}

fn csv_rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path)
        .unwrap()
        .records()
        .map(Result::unwrap)
        .collect()
}

#[test]
fn invert_identity_takes_one_step() {
    let dir = with_config("phi = eta\ntarget = s\nD = 32\nN = 4\n");
    let out = colotame(&["invert", "--config", "run.cfg", "--out", "o"], dir.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(csv_rows(&dir.path().join("o/result.csv")).len(), 1);
    assert_eq!(
        report_value(&dir.path().join("o/solution.txt"), "steps"),
        "1"
    );
}

#[test]
fn invert_cubic_contracts() {
    let dir = with_config("phi = eta+eta^3\ntarget = 0.05\nD = 32\nN = 4\n");
    let out = colotame(&["invert", "--config", "run.cfg", "--out", "o"], dir.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = csv_rows(&dir.path().join("o/result.csv"));
    assert!(rows.len() >= 2);
    for row in &rows {
        if !row[2].is_empty() {
            assert!(row[2].parse::<f64>().unwrap() <= 0.5 + 1e-6);
        }
    }
    let residual: f64 = report_value(&dir.path().join("o/solution.txt"), "residual_sup")
        .parse()
        .unwrap();
    assert!(residual <= 1e-10);
}

#[test]
fn vanishing_derivative_is_a_config_error() {
    let dir = with_config("phi = eta^2/2\n");
    let out = colotame(&["invert", "--config", "run.cfg", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error kind=config code=2"));
    assert!(!dir.path().join("o").exists());
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = with_config("phi = eta\nstep = 3\n");
    let out = colotame(
        &["certify", "--config", "run.cfg", "--out", "o"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn certify_affine() {
    let dir = with_config("phi = 2*eta + s\ny0 = 0.5*s\nD = 32\nN = 4\n");
    let out = colotame(
        &["certify", "--config", "run.cfg", "--out", "o"],
        dir.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = dir.path().join("o/generator.txt");
    assert_eq!(report_value(&report, "B0"), "1");
    assert_eq!(report_value(&report, "chi_zero"), "true");
    assert_eq!(report_value(&report, "certified"), "true");
}

#[test]
fn certify_cubic() {
    let dir = with_config("D = 32\nN = 4\nsamples = 16\npairs = 8\n");
    let out = colotame(
        &["certify", "--config", "run.cfg", "--out", "o"],
        dir.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        report_value(&dir.path().join("o/generator.txt"), "membership"),
        "ok"
    );
}

#[test]
fn broken_grading_fails_certification() {
    let dir = with_config("D = 32\nN = 4\nsamples = 16\npairs = 8\n");
    std::fs::write(dir.path().join("m.txt"), "1e-3 1e-3 1e-3 1e-3 1e-3\n").unwrap();
    let out = colotame(
        &[
            "certify",
            "--config",
            "run.cfg",
            "--out",
            "o",
            "--grading",
            "m.txt",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("kind=certificate") && stderr.contains("membership"),
        "{stderr}"
    );
    assert_eq!(
        report_value(&dir.path().join("o/generator.txt"), "certified"),
        "false"
    );
}

#[test]
fn selftest_passes_and_detects_fault() {
    let dir = tempfile::tempdir().unwrap();
    let out = colotame(&["selftest"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let out = colotame(&["selftest", "--fault", "theta"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL tameness-membership"));
}
