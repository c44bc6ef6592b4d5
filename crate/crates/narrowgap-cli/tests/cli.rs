use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn narrowgap(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_narrowgap")).args(args).current_dir(dir).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn solve_capacitor_writes_report_and_dumps() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "cap.json",
        r#"{"preset": "capacitor_strip_2d", "eps_list": [0.05],
            "phi": {"kind": "builtin", "name": "capacitor_drive"},
            "output_dir": "out", "dumps": {"csv": true, "binary": true, "svg": true}}"#,
    );
    let o = narrowgap(&["solve", &cfg], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = tmp.path().join("out");
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let sup = report["report"]["sup_grad_u"].as_f64().unwrap();
    assert!((sup - 20.0).abs() <= 20.0 * 1e-6, "{sup}");
    for f in ["field.csv", "field.bin", "grad_u.svg"] {
        assert!(out.join(f).metadata().unwrap().len() > 0, "{f}");
    }
}

#[test]
fn malformed_json_exits_one_with_location() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "bad.json", "{\"preset\": \"two_disks_2d\",\n \"eps_list\": [0.1,]}");
    let o = narrowgap(&["solve", &cfg], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn unknown_key_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", r#"{"preset": "two_disks_2d", "eps_list": [0.1], "epsilon": 0.1}"#);
    let o = narrowgap(&["solve", &cfg], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown field"), "{}", stderr(&o));
}

#[test]
fn missing_config_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let o = narrowgap(&["solve", "nope.json"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn coarse_spacing_exits_two_with_resolution() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", r#"{"preset": "two_disks_2d", "eps_list": [0.1], "h_rule": {"divisor": 4}}"#);
    let o = narrowgap(&["solve", &cfg], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("RESOLUTION"), "{}", stderr(&o));
}

#[test]
fn sweep_with_two_epsilons_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", r#"{"preset": "two_disks_2d", "eps_list": [0.1, 0.05]}"#);
    let o = narrowgap(&["sweep", &cfg], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("need >= 4"), "{}", stderr(&o));
}

#[test]
fn two_disks_sweep_passes_and_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg =
        write(tmp.path(), "c.json", r#"{"preset": "two_disks_2d", "eps_list": [0.1, 0.05, 0.025, 0.0125, 0.00625]}"#);
    let a = narrowgap(&["sweep", &cfg, "--out", "a", "--threads", "1"], tmp.path());
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    let b = narrowgap(&["sweep", &cfg, "--out", "b"], tmp.path());
    assert_eq!(b.status.code(), Some(0), "{}", stderr(&b));
    let csv = |d: &str| fs::read(tmp.path().join(d).join("sweep.csv")).unwrap();
    assert_eq!(csv("a"), csv("b"));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("a/summary.json")).unwrap()).unwrap();
    let slope = summary["sup_exponent"].as_f64().unwrap();
    assert!((slope + 0.5).abs() <= 0.1, "{slope}");
    assert_eq!(summary["pass"], true);
}

#[test]
fn integrals_regimes_pass() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "c.json",
        r#"{"preset": "integral_only_3d", "eps_list": [1e-8, 1e-6, 1e-4, 1e-2],
            "integrals": [
              {"orders": [1, 1], "n": 3, "r": 1.0, "eps_list": [1e-8, 1e-6, 1e-4, 1e-2]},
              {"orders": ["inf"], "n": 2, "r": 1.0, "eps_list": [1e-8, 1e-6, 1e-4, 1e-2]},
              {"orders": [1, 2], "n": 3, "r": 1.0, "eps_list": [1e-8, 1e-6, 1e-4, 1e-2]}
            ]}"#,
    );
    let o = narrowgap(&["integrals", &cfg, "--format", "csv"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = String::from_utf8(o.stdout).unwrap();
    assert_eq!(csv.lines().count(), 13);
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn verify_subset_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let o = narrowgap(&["verify", "--only", "1,2,8"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 3);
}

#[test]
fn verify_with_flipped_a12_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let o = narrowgap(&["verify", "--only", "9", "--inject-fault", "flip-a12"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("FAIL [  9]") && text.contains("a12 <= 0"), "{text}");
}

#[test]
fn verify_with_loose_quadrature_reports_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let o = narrowgap(&["verify", "--only", "6,8", "--quad-tol", "0.5"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("FAIL [  6]"), "{text}");
    assert!(text.contains("PASS [  8]"), "{text}");
}

#[test]
fn unknown_criterion_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let o = narrowgap(&["verify", "--only", "99"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
}
