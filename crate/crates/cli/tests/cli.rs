use std::process::{Command, Output};

use serde_json::Value;

fn msum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msum"))
        .args(args)
        .env("NO_COLOR", "1")
        .output()
        .expect("spawn msum")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

const FIG2: [&str; 10] = ["--cap", "0.025", "--vol", "0.20", "--rate", "0.03", "--div", "0.02", "--term", "1"];

#[test]
fn price_json_has_breakdown_keys() {
    let mut args = vec!["price"];
    args.extend(FIG2);
    args.extend(["--months", "12", "--order", "1", "--format", "json"]);
    let out = msum(&args);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    for key in ["ms0", "ms1", "total", "nu", "v", "eps1", "y_eff"] {
        assert!(v[key].is_f64(), "missing {key}");
    }
    assert!((v["total"].as_f64().unwrap() - 0.008347782166030632).abs() < 1e-15);
    assert_eq!(v["order"], 1);
}

#[test]
fn order_zero_omits_correction() {
    let out = msum(&["price", "--order", "0"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["ms1"].as_f64(), Some(0.0));
    assert_eq!(v["total"], v["ms0"]);
}

#[test]
fn zero_cap_prices_to_zero() {
    let out = msum(&["price", "--cap", "0", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["total"].as_f64(), Some(0.0));
}

#[test]
fn floor_above_cap_is_bad_input() {
    let out = msum(&["price", "--cap", "0.025", "--floor", "0.05"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("floor") && err.contains(">= cap"), "{err}");
    assert_eq!(err.lines().count(), 1);
    assert!(out.stdout.is_empty());
}

#[test]
fn bad_inputs_exit_two() {
    for args in [
        vec!["price", "--vol", "0"],
        vec!["price", "--vol", "-0.2"],
        vec!["price", "--months", "0"],
        vec!["price", "--term", "nan"],
        vec!["price", "--order", "2"],
        vec!["price", "--vol", "abc"],
        vec!["price", "--threads", "0"],
        vec!["mc", "--mc-paths", "1"],
        vec!["sweep", "--axis", "vol", "--from", "0.1", "--to", "0.1", "--step", "0.05"],
        vec!["sweep", "--axis", "vol", "--from", "0.1", "--to", "0.2", "--step", "-0.05"],
        vec!["sweep", "--axis", "months", "--from", "1", "--to", "3", "--step", "0.5"],
        vec!["sweep", "--axis", "vol", "--from", "0.1", "--to", "0.3", "--step", "0.1", "--vol", "x"],
        vec!["validate", "--tol", "-1"],
        vec!["frobnicate"],
        vec![],
    ] {
        let out = msum(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(msum(&["--help"]).status.code(), Some(0));
    assert_eq!(msum(&["price", "--help"]).status.code(), Some(0));
    assert_eq!(msum(&["--version"]).status.code(), Some(0));
}

#[test]
fn errors_are_uncoloured_when_piped() {
    let out = msum(&["price", "--vol", "0"]);
    assert!(stderr(&out).starts_with("error: "));
}

#[test]
fn json_round_trips_through_repricing() {
    let first = msum(&["price", "--cap", "0.04", "--floor", "-0.01", "--vol", "0.27", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&first)).unwrap();
    let inputs = &v["inputs"];
    let arg = |k: &str| inputs[k].to_string();
    let again = msum(&[
        "price", "--format", "json",
        "--cap", &arg("cap"), "--floor", &arg("floor"), "--vol", &arg("vol"),
        "--rate", &arg("rate"), "--div", &arg("div"), "--term", &arg("term"), "--months", &arg("months"),
    ]);
    assert_eq!(stdout(&first), stdout(&again));
    let w: Value = serde_json::from_str(&stdout(&again)).unwrap();
    assert_eq!(v, w);
}

#[test]
fn config_file_sits_between_flags_and_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "vol = 0.3\ncap = 0.05\norder = 0\n").unwrap();
    let p = path.to_str().unwrap();
    let from_file: Value = serde_json::from_str(&stdout(&msum(&["price", "--config", p]))).unwrap();
    assert_eq!(from_file["inputs"]["vol"].as_f64(), Some(0.3));
    assert_eq!(from_file["inputs"]["cap"].as_f64(), Some(0.05));
    assert_eq!(from_file["inputs"]["rate"].as_f64(), Some(0.03));
    assert_eq!(from_file["order"], 0);
    let flagged: Value = serde_json::from_str(&stdout(&msum(&["price", "--config", p, "--vol", "0.1"]))).unwrap();
    assert_eq!(flagged["inputs"]["vol"].as_f64(), Some(0.1));

    std::fs::write(&path, "volatility = 0.3\n").unwrap();
    let out = msum(&["price", "--config", p]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("volatility"));
    assert_eq!(msum(&["price", "--config", "/nonexistent/run.toml"]).status.code(), Some(2));
}

fn sweep_vol(threads: &str) -> Output {
    let mut args = vec!["sweep", "--axis", "vol", "--from", "0.05", "--to", "0.40", "--step", "0.05"];
    args.extend(FIG2[..2].iter().chain(&FIG2[4..]));
    args.extend(["--months", "12", "--mc-paths", "20000", "--seed", "42", "--threads", threads]);
    msum(&args)
}

#[test]
fn vol_sweep_has_eight_rows_and_fixed_header() {
    let out = sweep_vol("1");
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "axis,axis_value,ms0,ms0_plus_ms1,mc_mean,mc_stderr,msln_mc_mean");
    assert_eq!(lines.len(), 9);
    assert!(lines[1..].iter().all(|l| l.starts_with("vol,") && l.split(',').count() == 7));
    assert!(!text.contains('\r'));
    assert!(text.ends_with('\n'));
    // 12 significant digits
    assert_eq!(lines[1].split(',').nth(1), Some("5.00000000000e-2"));
}

#[test]
fn sweep_csv_is_byte_stable_across_runs_and_threads() {
    let a = sweep_vol("1").stdout;
    assert_eq!(a, sweep_vol("1").stdout);
    assert_eq!(a, sweep_vol("2").stdout);
    assert_eq!(a, sweep_vol("8").stdout);
}

#[test]
fn cap_sweep_has_twenty_rows_without_mc() {
    let out = msum(&["sweep", "--axis", "cap", "--from", "0.005", "--to", "0.10", "--step", "0.005", "--vol", "0.20"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 21);
    for line in text.lines().skip(1) {
        assert!(line.ends_with(",,,"), "{line}");
    }
}

#[test]
fn months_sweep_keeps_monthly_periods() {
    let out = msum(&["sweep", "--axis", "months", "--from", "12", "--to", "24", "--step", "12", "--format", "json"]);
    let rows: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let one_year: Value = serde_json::from_str(&stdout(&msum(&["price"]))).unwrap();
    let two_years: Value = serde_json::from_str(&stdout(&msum(&["price", "--months", "24", "--term", "2"]))).unwrap();
    assert_eq!(rows[0]["ms0_plus_ms1"], one_year["total"]);
    assert_eq!(rows[1]["ms0_plus_ms1"], two_years["total"]);
    assert!(rows[0]["mc_mean"].is_null());
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.csv");
    let out = msum(&["price", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("ms0,ms1,total,order,nu,v,eps1,y_eff\n"));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn mc_reports_both_payoffs() {
    let out = msum(&["mc", "--mc-paths", "100000", "--seed", "42", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["mc_mean"].as_f64(), Some(0.008463633321778843));
    assert_eq!(v["mc_stderr"].as_f64(), Some(8.637918760221772e-5));
    assert!(v["msln_mc_mean"].as_f64().unwrap() > 0.0);
    assert_eq!(v["paths"], 100000);
}

#[test]
fn validate_passes_by_default() {
    let out = msum(&["validate"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("formula,checks,max_rel_err,tolerance,status"));
    assert_eq!(text.lines().count(), 9);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",pass")));
}

#[test]
fn printed_formulas_fail_validation_naming_i2_cap() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("d.jsonl");
    let out = msum(&["validate", "--printed-formulas", "--discrepancy-log", log.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("I2_cap"));
    assert!(stdout(&out).contains("I2_cap,240,"));
    let records: Vec<Value> = std::fs::read_to_string(&log)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert!(records.iter().any(|r| r["formula"] == "I2_cap"));
    assert!(records.iter().all(|r| r["formula"] != "I1_cap" && r["formula"] != "I3_cap"));
}

#[test]
fn loose_tolerance_passes_formulas_with_small_typo_effect() {
    let out = msum(&["validate", "--printed-formulas", "--tol", "1e-3", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let status = |name: &str| {
        v["formulas"].as_array().unwrap().iter().find(|f| f["formula"] == name).unwrap()["passed"].as_bool().unwrap()
    };
    assert!(status("I1_cap") && status("I3_cap"));
    assert!(!status("I2_cap"));
    // every printed-mode failure is a formula whose typo effect exceeds 1e-3
    assert_eq!(out.status.code(), Some(if v["passed"].as_bool().unwrap() { 0 } else { 1 }));
    assert_eq!(msum(&["validate", "--tol", "1e-3"]).status.code(), Some(0));
}
