use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn horoflow(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_horoflow"))
        .args(args)
        .env("HOROFLOW_OUTPUT_DIR", dir)
        .output()
        .expect("binary runs")
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records()
        .map(|rec| rec.unwrap().iter().map(str::to_owned).collect())
        .collect()
}

#[test]
fn build_lists_the_index_sequence() {
    let dir = tempfile::tempdir().unwrap();
    let out = horoflow(dir.path(), &["build", "--delta", "3", "--count", "6"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&dir.path().join("build_construction.csv"));
    let p: Vec<u64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(p, [2, 5, 11, 23, 47, 95]);
    // c = 1/p
    let c: f64 = rows[0][4].parse().unwrap();
    assert_eq!(c, 0.5);
}

#[test]
fn invalid_and_oversized_parameters_fail() {
    let dir = tempfile::tempdir().unwrap();
    let out = horoflow(dir.path(), &["build", "--delta", "1"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("δ > 1"));

    // the index ratio is about 201 per step, so 30 entries overflow u64
    let out = horoflow(dir.path(), &["build", "--delta", "1.01", "--count", "30"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("capacity exceeded"));
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = horoflow(dir.path(), &["verify", "--suite", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
}

#[test]
fn disjoint_suite_writes_a_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let out = horoflow(dir.path(), &["verify", "--delta", "3", "--suite", "disjoint"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let cert: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("disjoint.json")).unwrap()).unwrap();
    for key in ["suite", "delta", "checks", "truncation", "timing_ms"] {
        assert!(cert.get(key).is_some(), "missing {key}");
    }
    let checks = cert["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["pass"] == true));
    assert!(checks
        .iter()
        .filter(|c| c["name"] == "positive-consecutive")
        .all(|c| c["margin"].as_f64().unwrap() > 0.0));
}

#[test]
fn fineness_failure_sets_the_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let out = horoflow(
        dir.path(),
        &["verify", "--suite", "fineness", "--t-grid", "0:4:1", "--count", "5", "--fineness-max-length", "2"],
    );
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("verify.report.json")).unwrap()).unwrap();
    assert_eq!(report["outcomes"][0]["verdict"], "fail");
}

#[test]
fn times_suite_certifies_both_targets() {
    let dir = tempfile::tempdir().unwrap();
    let out = horoflow(dir.path(), &["verify", "--suite", "times"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let rows = csv_rows(&dir.path().join("times_detected_times.csv"));
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r[1] == "true"));
}

#[test]
fn plot_data_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let out = horoflow(
        dir.path(),
        &["plotdata", "--kind", "fineness", "--t-grid", "0:10:0.5", "--fineness-max-length", "2"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(csv_rows(&dir.path().join("plot_fineness.csv")).len(), 21);

    assert!(horoflow(dir.path(), &["plotdata", "--kind", "busemann"]).status.success());
    let rows = csv_rows(&dir.path().join("plot_busemann.csv"));
    let last = rows.last().unwrap();
    let (p, value, target): (u64, f64, f64) =
        (last[1].parse().unwrap(), last[2].parse().unwrap(), last[3].parse().unwrap());
    assert!(p >= 1500 && (value - target).abs() < 2e-3);

    assert!(horoflow(dir.path(), &["plotdata", "--kind", "circles", "--count", "8"]).status.success());
    for r in csv_rows(&dir.path().join("plot_circles.csv")) {
        assert_eq!(r[0].parse::<f64>().unwrap(), r[2].parse::<f64>().unwrap());
    }
}

#[test]
fn identical_configs_give_identical_csv() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["verify", "--suite", "irregular", "--word-max-length", "4"];
    assert!(horoflow(a.path(), &args).status.success());
    assert!(horoflow(b.path(), &[&args[..], &["--parallel"]].concat()).status.success());
    let mut names: Vec<_> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .filter(|n| n.to_string_lossy().ends_with(".csv"))
        .collect();
    names.sort();
    assert!(!names.is_empty());
    for n in names {
        assert_eq!(fs::read(a.path().join(&n)).unwrap(), fs::read(b.path().join(&n)).unwrap());
    }
}

#[test]
fn config_file_and_echo_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "delta = 2.5\ngenerator_count = 7\ntol.detect_time = 0.03\n").unwrap();
    let out = horoflow(dir.path(), &["build", "--config", cfg.to_str().unwrap(), "--count", "4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let echo = fs::read_to_string(dir.path().join("build.config")).unwrap();
    assert!(echo.contains("delta = 2.5\n"));
    assert!(echo.contains("generator_count = 4\n"));
    assert!(echo.contains("tol.detect_time = 0.03\n"));
    // the echo is itself a valid config
    let again = horoflow(dir.path(), &["build", "--config", dir.path().join("build.config").to_str().unwrap()]);
    assert!(again.status.success());
    assert_eq!(fs::read_to_string(dir.path().join("build.config")).unwrap(), echo);
}
