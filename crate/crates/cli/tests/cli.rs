//! End-to-end tests of the `frameloop` binary.

use frameloop::extension::{build_extension, default_anchors, BoundaryData};
use frameloop::models::builtin_t_tau2;
use frameloop::transport::{transport, LoopSpec, TransportConfig};
use serde_json::Value;
use std::f64::consts::{FRAC_PI_2, PI};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn frameloop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frameloop"))
        .args(args)
        .current_dir(crate_dir())
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

/// Parses a report and blanks the wall-clock field.
fn masked(text: &str) -> Value {
    let mut v: Value = serde_json::from_str(text).unwrap();
    v["runtime_ms"] = Value::from(0);
    v
}

/// Compares with `tests/golden/<name>.json`; set `UPDATE_GOLDEN=1` to rewrite.
fn check_golden(name: &str, text: &str) {
    let path = crate_dir().join("tests/golden").join(format!("{name}.json"));
    let actual = masked(text);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, serde_json::to_string_pretty(&actual).unwrap() + "\n").unwrap();
    }
    let expected: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(actual, expected, "report differs from {}", path.display());
}

const REPORT_KEYS: [&str; 18] = [
    "model",
    "constants",
    "loop",
    "n",
    "d",
    "min_gap",
    "sign_pattern",
    "class_kind",
    "winding",
    "z2",
    "degeneracy_implied",
    "evidence",
    "samples_used",
    "refinements",
    "runtime_ms",
    "version",
    "config",
    "caveat",
];

fn top_level_keys(text: &str) -> Vec<String> {
    text.lines()
        .filter(|l| l.starts_with("  \"") && !l.starts_with("   "))
        .map(|l| l.trim().split('"').nth(1).unwrap().to_string())
        .collect()
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|f| f.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

fn temp_file(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.display().to_string()
}

#[test]
fn classify_large_e_epsilon_circle() {
    let out = frameloop(&["classify", "--builtin", "e-epsilon", "--k", "1", "--g", "1", "--circle", "100", "--samples", "1024"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(top_level_keys(&text), REPORT_KEYS);
    let v = masked(&text);
    assert_eq!(v["evidence"], "NontrivialClass");
    assert_eq!(v["winding"], -1);
    assert_eq!(v["sign_pattern"], serde_json::json!([1, 1]));
    check_golden("classify_e_epsilon_large", &text);
}

#[test]
fn classify_small_e_epsilon_circle() {
    let out = frameloop(&["classify", "--builtin", "e-epsilon", "--circle", "0.1", "--samples", "256"]);
    assert_eq!(code(&out), 0);
    let v = masked(&stdout(&out));
    assert_eq!(v["evidence"], "SignChange");
    assert_eq!(v["class_kind"], "sign_change_only");
    assert_eq!(v["sign_pattern"], serde_json::json!([-1, -1]));
    check_golden("classify_e_epsilon_small", &stdout(&out));
}

#[test]
fn classify_g_g_loop_file() {
    let out = frameloop(&["classify", "--builtin", "g-g", "--coupling", "1", "--loop-file", "data/paper_gg.loop"]);
    assert_eq!(code(&out), 0);
    let v = masked(&stdout(&out));
    assert_eq!(v["evidence"], "NontrivialClass");
    assert_eq!(v["sign_pattern"], serde_json::json!([1, 1, 1, 1]));
    assert_eq!(v["z2"], "nontrivial");
    check_golden("classify_g_g", &stdout(&out));
}

#[test]
fn classify_double_crossing_is_inconclusive() {
    let out = frameloop(&["classify", "--builtin", "t-tau2", "--loop-file", "data/double_cross.loop"]);
    assert_eq!(code(&out), 0);
    let v = masked(&stdout(&out));
    assert_eq!(v["evidence"], "None");
    assert_eq!(v["degeneracy_implied"], false);
    assert_eq!(v["z2"], "trivial");
    assert!(v["caveat"].as_str().unwrap().starts_with("inconclusive"));
    check_golden("classify_double_cross", &stdout(&out));
}

#[test]
fn classify_several_loops_in_parallel() {
    let out = frameloop(&[
        "classify",
        "--builtin",
        "t-tau2",
        "--loop-file",
        "data/double_cross.loop",
        "--loop-file",
        "data/single_cross.loop",
        "--jobs",
        "2",
    ]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let reports = v.as_array().unwrap();
    assert_eq!(reports.len(), 2);
    assert_eq!(reports[0]["z2"], "trivial");
    assert_eq!(reports[1]["z2"], "nontrivial");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // the circle of radius 2 runs through the degeneracy at (-2, 0)
    let out = frameloop(&["classify", "--builtin", "e-epsilon", "--circle", "2", "--samples", "64"]);
    assert_eq!(code(&out), 2);

    let bad_model = temp_file(dir.path(), "bad.model", "dim 2\nparams 1\nH[1][1] = * Q1\n");
    let out = frameloop(&["classify", "--model-file", &bad_model, "--circle", "1"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let open_loop = temp_file(dir.path(), "open.loop", "params 2\n0 1 0\n1 0 1\n2 -1 0\n");
    let out = frameloop(&["classify", "--builtin", "e-epsilon", "--loop-file", &open_loop]);
    assert_eq!(code(&out), 3);

    let out = frameloop(&["classify", "--builtin", "e-epsilon", "--loop-file", "data/paper_gg.loop"]);
    assert_eq!(code(&out), 3);

    let out = frameloop(&["classify", "--builtin", "e-epsilon", "--circle", "1", "--samples", "3", "--max-depth", "0"]);
    assert_eq!(code(&out), 4);

    let csv = dir.path().join("x.csv").display().to_string();
    let out = frameloop(&["extend", "--builtin", "t-tau2", "--loop-file", "data/single_cross.loop", "--output", &csv]);
    assert_eq!(code(&out), 5);
    let out = frameloop(&["extend", "--builtin", "e-epsilon", "--circle", "0.1", "--output", &csv]);
    assert_eq!(code(&out), 5);

    let out = frameloop(&["classify", "--builtin", "nope", "--circle", "1"]);
    assert_eq!(code(&out), 1);
    let out = frameloop(&["classify", "--circle", "1"]);
    assert_eq!(code(&out), 1);
    assert_eq!(code(&frameloop(&["--help"])), 0);
}

#[test]
fn figure_t_tau2_unit_circle() {
    let out = frameloop(&["figure", "--builtin", "t-tau2", "--circle", "1", "--samples", "1024"]);
    assert_eq!(code(&out), 0);
    let (header, rows) = parse_csv(&stdout(&out));
    assert_eq!(header, ["theta", "phi", "v1", "v2", "v3"]);
    assert_eq!(rows.len(), 1025);
    let quarter = &rows[256];
    assert!((quarter[0] - FRAC_PI_2).abs() < 1e-15);
    assert!((quarter[1] - PI).abs() < 1e-8);
    let (before, after) = (&rows[255], &rows[257]);
    assert!(before[2] * after[2] < 0.0 && before[4] * after[4] < 0.0);
}

#[test]
fn figure_g_g_reaches_pi_once() {
    let out = frameloop(&["figure", "--builtin", "g-g", "--loop-file", "data/paper_gg.loop"]);
    assert_eq!(code(&out), 0);
    let (_, rows) = parse_csv(&stdout(&out));
    let phi: Vec<f64> = rows[..rows.len() - 1].iter().map(|r| r[1]).collect();
    let m = phi.len();
    let peaks = (0..m)
        .filter(|&k| phi[k] > PI - 1e-2 && phi[k] >= phi[(k + m - 1) % m] && phi[k] > phi[(k + 1) % m])
        .count();
    assert_eq!(peaks, 1);
    // the axis reverses exactly once across the peak
    let flips = (0..m)
        .filter(|&k| {
            let (a, b) = (&rows[k], &rows[(k + 1) % m]);
            a[2] * b[2] + a[3] * b[3] + a[4] * b[4] < 0.0 && (a[1] > 3.0 || b[1] > 3.0)
        })
        .count();
    assert_eq!(flips, 1);
}

#[test]
fn figure_constant_model_and_dimension_check() {
    let dir = tempfile::tempdir().unwrap();
    let model = temp_file(dir.path(), "c.model", "dim 3; params 2\nH[1][1] = -1; H[3][3] = 1\n");
    let out = frameloop(&["figure", "--model-file", &model, "--circle", "1", "--samples", "16"]);
    assert_eq!(code(&out), 0);
    let (_, rows) = parse_csv(&stdout(&out));
    assert!(rows.iter().all(|r| r[1] == rows[0][1]));
    let out = frameloop(&["figure", "--builtin", "e-epsilon", "--circle", "1"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn transport_trace() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let csv_s = csv.display().to_string();
    let out = frameloop(&["transport", "--builtin", "e-epsilon", "--circle", "0.1", "--samples", "64", "--output", &csv_s]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("D = diag(-1, -1)\n"));
    let (header, rows) = parse_csv(&std::fs::read_to_string(&csv).unwrap());
    assert_eq!(header, ["t", "lambda_1", "lambda_2", "f_1_1", "f_1_2", "f_2_1", "f_2_2", "min_overlap"]);
    assert_eq!(rows.len(), 65);
    assert!(rows.iter().all(|r| r[7] >= 0.9));

    // constant model: every row past the parameter column is identical
    let model = temp_file(dir.path(), "c.model", "dim 2; params 2\nH[1][1] = -1; H[2][2] = 1\n");
    let out = frameloop(&["transport", "--model-file", &model, "--circle", "1", "--samples", "8", "--output", &csv_s]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("D = diag(1, 1)\n"));
    let (_, rows) = parse_csv(&std::fs::read_to_string(&csv).unwrap());
    assert!(rows.iter().all(|r| r[1..] == rows[0][1..]));

    // concentric T x tau2 circles carry the same eigenvectors
    let traces: Vec<Vec<Vec<f64>>> = ["0.5", "2"]
        .iter()
        .map(|r| {
            let out = frameloop(&["transport", "--builtin", "t-tau2", "--circle", r, "--samples", "128", "--output", &csv_s]);
            assert_eq!(code(&out), 0);
            parse_csv(&std::fs::read_to_string(&csv).unwrap()).1
        })
        .collect();
    for (a, b) in traces[0].iter().zip(&traces[1]) {
        for i in 4..13 {
            assert!((a[i] - b[i]).abs() < 1e-12);
        }
    }
}

#[test]
fn extend_double_crossing_loop() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("ext.csv");
    let csv_s = csv.display().to_string();
    let out = frameloop(&[
        "extend",
        "--builtin",
        "t-tau2",
        "--loop-file",
        "data/double_cross.loop",
        "--rho-slices",
        "32",
        "--output",
        &csv_s,
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rep: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rep["passed"], true);
    assert!(rep["boundary_mismatch"].as_f64().unwrap() < 1e-8);
    assert!(rep["min_gap"].as_f64().unwrap() > 0.0);

    // the CSV parses back to exactly the values the library computes
    let (header, rows) = parse_csv(&std::fs::read_to_string(&csv).unwrap());
    assert_eq!(header, ["rho", "theta", "h_1_1", "h_1_2", "h_1_3", "h_2_2", "h_2_3", "h_3_3"]);
    let lp = LoopSpec::parse(&std::fs::read_to_string(crate_dir().join("data/double_cross.loop")).unwrap()).unwrap();
    let tr = transport(&builtin_t_tau2(), &lp, &TransportConfig::default()).unwrap();
    let b = BoundaryData::from_transport(&tr).unwrap();
    let ext = build_extension(&b, &default_anchors(3), 32).unwrap();
    assert_eq!(rows.len(), 32 * b.len());
    for (idx, row) in rows.iter().enumerate() {
        let (j, k) = (idx / b.len(), idx % b.len());
        assert!((row[0] - ext.rhos()[j]).abs() <= 1e-12);
        assert!((row[1] - ext.thetas()[k]).abs() <= 1e-12);
        for (x, y) in row[2..].iter().zip(ext.node(j, k).upper_triangle()) {
            assert!((x - y).abs() <= 1e-12);
        }
    }
}

#[test]
fn extend_constant_model_with_anchors() {
    let dir = tempfile::tempdir().unwrap();
    let model = temp_file(dir.path(), "c.model", "dim 2; params 2\nH[1][1] = -3; H[2][2] = 3\n");
    let csv = dir.path().join("ext.csv").display().to_string();
    let report = dir.path().join("rep.json");
    let out = frameloop(&[
        "extend",
        "--model-file",
        &model,
        "--circle",
        "1",
        "--samples",
        "16",
        "--anchors",
        "-1,1",
        "--rho-slices",
        "64",
        "--output",
        &csv,
        "--report",
        &report.display().to_string(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rep: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep["passed"], true);
    assert_eq!(rep["anchors"], serde_json::json!([-1.0, 1.0]));
    assert!((rep["min_gap"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn models_list_and_check() {
    let out = frameloop(&["models", "list"]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout(&out),
        "name        n  d  constants\n\
         e-epsilon   2  2  k, g\n\
         t-tau2      3  3  -\n\
         g-g         4  4  coupling\n"
    );
    let out = frameloop(&["models", "check", "data/e_epsilon.model"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("name e-epsilon-file\ndim 2\nparams 2\n"));
}

#[test]
fn model_file_matches_builtin() {
    let a = frameloop(&["classify", "--model-file", "data/e_epsilon.model", "--circle", "100", "--samples", "1024"]);
    let b = frameloop(&["classify", "--builtin", "e-epsilon", "--circle", "100", "--samples", "1024"]);
    let (a, b) = (masked(&stdout(&a)), masked(&stdout(&b)));
    for key in ["sign_pattern", "winding", "evidence", "samples_used"] {
        assert_eq!(a[key], b[key]);
    }
}
