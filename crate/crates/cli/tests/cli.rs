use std::process::{Command, Output};

use dampwave::commands::{json, CheckReport, NormsReport, RatesReport, RootsReport};

fn dampwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dampwave"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

const SHORT: [&str; 6] = ["--t0", "1e2", "--t1", "1e4", "--count", "7"];

#[test]
fn norms_columns_and_grid() {
    let out = dampwave(&["norms", "--t0", "1e4", "--t1", "1e8", "--count", "25"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(
        text.lines().next().unwrap(),
        "t,norm_u,norm_phi,norm_err,energy,zone_low,zone_mid,zone_high,flag"
    );
    let rows = rows(&text);
    assert_eq!(rows.len(), 25);
    for (k, row) in rows.iter().enumerate() {
        assert_eq!(row.len(), 9);
        let t: f64 = row[0].parse().unwrap();
        let expected = 10f64.powf(4.0 + 4.0 * k as f64 / 24.0);
        assert!((t - expected).abs() <= 1e-14 * expected);
        let mantissa = row[1].split('e').next().unwrap();
        assert_eq!(mantissa.replace(['.', '-'], "").len(), 17);
        assert_eq!(row[8], "ok");
    }
    let first: f64 = rows[0][0].parse().unwrap();
    let last: f64 = rows[24][0].parse().unwrap();
    assert_eq!((first, last), (1e4, 1e8));
}

#[test]
fn norms_triangle_inequality() {
    let out = dampwave(&["norms", "--n", "1", "--theta", "0.75"]);
    for row in rows(&stdout(&out)) {
        let v: Vec<f64> = row[1..4].iter().map(|s| s.parse().unwrap()).collect();
        assert!(v[2] <= (v[0] + v[1]) * (1.0 + 1e-12), "{row:?}");
    }
}

#[test]
fn mean_zero_data_have_no_profile() {
    let out = dampwave(&[
        "norms",
        "--data",
        "mean-zero-gaussian-difference",
        "--n",
        "2",
    ]);
    assert!(out.status.success());
    for row in rows(&stdout(&out)) {
        assert_eq!(row[2].parse::<f64>().unwrap(), 0.0);
        assert!(row[1].parse::<f64>().unwrap() > 0.0);
    }
}

#[test]
fn csv_is_deterministic() {
    let a = dampwave(&["norms", "--n", "2", "--theta", "0.5"]);
    let b = dampwave(&["norms", "--n", "2", "--theta", "0.5", "--seedless"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_errors_exit_2_and_name_the_field() {
    let out = dampwave(&["roots", "--theta", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("theta"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, "# experiment\nn = 3\ncount = two\n").unwrap();
    let out = dampwave(&["roots", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3") && err.contains("count"), "{err}");

    let out = dampwave(&["norms", "--data", "cauchy"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, "theta = 0.5\nm = 2\nout = csv\n").unwrap();
    let out = dampwave(&["roots", "--config", path.to_str().unwrap(), "--m", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("key,value\n"));
    let json = dampwave(&["roots", "--theta", "0.5", "--m", "1"]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    let delta = v["thresholds"]["delta"].as_f64().unwrap();
    let csv_delta: f64 = text.lines().nth(1).unwrap()[6..].parse().unwrap();
    assert_eq!(delta, csv_delta);
}

#[test]
fn roots_report() {
    let out = dampwave(&["roots"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    let delta = v["thresholds"]["delta"].as_f64().unwrap();
    assert!(delta > 2.2 && delta < 2.4);
    assert_eq!(v["sign_pattern_ok"], true);
}

fn round_trip<T: serde::de::DeserializeOwned + serde::Serialize>(args: &[&str]) {
    let text = stdout(&dampwave(args));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["schema_version"], 1, "{args:?}");
    let typed: T = serde_json::from_str(&text).unwrap();
    assert_eq!(json(&typed), text, "{args:?}");
}

#[test]
fn json_reports_round_trip() {
    round_trip::<RootsReport>(&["roots"]);
    let mut norms = vec!["norms", "--out", "json"];
    norms.extend(SHORT);
    round_trip::<NormsReport>(&norms);
    let mut rates = vec!["rates", "--n", "1", "--theta", "0.5"];
    rates.extend(["--t0", "1e4", "--t1", "1e7", "--count", "10"]);
    round_trip::<RatesReport>(&rates);
    round_trip::<CheckReport>(&["lemmas", "--t-max", "1e4"]);
    round_trip::<CheckReport>(&["verify", "--n", "1", "--theta", "0.75"]);
}

#[test]
fn verify_passes_and_negative_control_fails() {
    let out = dampwave(&["verify"]);
    assert!(out.status.success(), "{}", stdout(&out));

    let out = dampwave(&["verify", "--expect-exponent", "0.1", "--out", "csv"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    let line = text
        .lines()
        .find(|l| l.starts_with("growth-law/solution-exponent"))
        .unwrap();
    let fields: Vec<&str> = line.split(',').collect();
    assert_eq!(fields[1], "fail");
    let measured: f64 = fields[2].parse().unwrap();
    let expected: f64 = fields[3].parse().unwrap();
    assert!((measured + 0.25).abs() < 0.03);
    assert_eq!(expected, 0.1);
}

#[test]
fn resolved_subset_under_t_max() {
    let out = dampwave(&[
        "verify",
        "--quad-mode",
        "resolved",
        "--t-max",
        "1e4",
        "--out",
        "csv",
    ]);
    let text = stdout(&out);
    assert!(out.status.success(), "{text}");
    assert!(text.contains("growth-law,skipped"));
    assert!(text.contains("consistency/averaged-vs-resolved@1e4,pass"));
}

#[test]
fn mean_zero_verify_skips_rate_laws() {
    let out = dampwave(&[
        "verify",
        "--data",
        "mean-zero-gaussian-difference",
        "--out",
        "csv",
    ]);
    let text = stdout(&out);
    assert!(out.status.success(), "{text}");
    assert!(text.contains("profile-dominance,skipped"));
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("roots.json");
    let out = dampwave(&["roots", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["schema_version"], 1);
}
