use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn pdmcs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdmcs")).args(args).output().expect("spawn pdmcs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn state_report_for_a_cosh_label() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = pdmcs(&["state", "--family", "cosh", "--alpha", "1.5", "--z", "0.8", "--out", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&dir.path().join("report.json"));
    assert!(f(&r["moments"]["product"]) >= 0.25);
    assert!((f(&r["mean_xbar"]) - 1.6).abs() < 1e-7);
    let csv = fs::read_to_string(dir.path().join("state.csv")).unwrap();
    assert_eq!(csv.lines().count(), 482);
}

#[test]
fn rational_unit_alpha_at_the_origin_is_the_ground_state() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = pdmcs(&["state", "--family", "rational", "--alpha", "1", "--z", "0", "--out", out, "--format", "json"]);
    assert!(o.status.success());
    let m = &read_json(&dir.path().join("report.json"))["moments"];
    assert!((f(&m["var_x"]) - 1.0).abs() < 1e-6);
    assert!((f(&m["var_p"]) - 0.25).abs() < 1e-6);
    let s = read_json(&dir.path().join("state.json"));
    let (x, re) = (s["x"].as_array().unwrap(), s["re"].as_array().unwrap());
    for (x, v) in x.iter().zip(re).step_by(40) {
        let x = f(x);
        let expect = (2.0 * std::f64::consts::PI).powf(-0.25) * (-x * x / 4.0).exp();
        assert!((f(v) - expect).abs() < 1e-12, "x = {x}");
    }
}

#[test]
fn half_period_reverses_the_mean() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = pdmcs(&["state", "--family", "cosh", "--alpha", "1", "--z", "1", "--t", "3.141592653589793", "--out", out]);
    assert!(o.status.success());
    let e = &read_json(&dir.path().join("report.json"))["evolved"];
    assert!((f(&e["mean_xbar"]) + 2.0).abs() < 1e-7);
    assert!(dir.path().join("state_t.csv").exists());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# a run\nfamily = cosh\nalpha = 1.2\nz = 0.5+0.5i\n").unwrap();
    let out = dir.path().join("o");
    let o = pdmcs(&["state", "--config", cfg.to_str().unwrap(), "--alpha", "0.7", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&out.join("report.json"));
    assert_eq!(f(&r["profile"]["alpha"]), 0.7);
    assert_eq!(r["z"], serde_json::json!([0.5, 0.5]));
}

#[test]
fn outputs_are_byte_identical_without_stamp() {
    let run = |stamp: bool| {
        let dir = tempfile::tempdir().unwrap();
        let mut args = vec!["state", "--family", "rational", "--alpha", "0.8", "--z", "1-0.4i", "--t", "0.9"];
        let out = dir.path().to_str().unwrap().to_string();
        args.extend(["--out", &out]);
        if stamp {
            args.push("--stamp");
        }
        assert!(pdmcs(&args).status.success());
        (fs::read(dir.path().join("report.json")).unwrap(), fs::read(dir.path().join("state_t.csv")).unwrap())
    };
    assert_eq!(run(false), run(false));
    let stamped = String::from_utf8(run(true).0).unwrap();
    assert!(stamped.contains("unix_time"));
}

#[test]
fn sweep_is_deterministic_and_flat_for_constant_mass() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("flat.spec");
    fs::write(&spec, "family = rational\nalphas = 1\nz = 0.5:2.0:0.5\n").unwrap();
    let a = pdmcs(&["sweep", spec.to_str().unwrap()]);
    let b = pdmcs(&["sweep", spec.to_str().unwrap()]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "product").unwrap();
    assert_eq!(text.lines().count(), 5);
    for line in text.lines().skip(1) {
        let product: f64 = line.split(',').nth(col).unwrap().parse().unwrap();
        assert!((product - 0.25).abs() < 1e-6);
    }
}

#[test]
fn sweep_with_an_unreachable_cell_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("far.spec");
    fs::write(&spec, "family = cosh\nalphas = 1\nz = 0.5, 20\n").unwrap();
    let o = pdmcs(&["sweep", spec.to_str().unwrap(), "--out", dir.path().join("s.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(fs::read_to_string(dir.path().join("s.csv")).unwrap().contains("NaN"));
}

#[test]
fn malformed_sweep_spec_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bad.spec");
    fs::write(&spec, "family = cosh\nalphas = 1\nz = 1, x\n").unwrap();
    assert_eq!(pdmcs(&["sweep", spec.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn wigner_negativity_in_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = pdmcs(&[
        "wigner", "--family", "cosh", "--alpha", "1.2", "--z", "0.2", "--points", "129", "--p-points", "129", "--x-min", "-6",
        "--x-max", "6", "--p-min", "-6", "--p-max", "6", "--format", "json", "--out", out, "--matrix",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let d = &read_json(&dir.path().join("wigner_diagnostics.json"))["diagnostics"];
    assert_eq!(d["negativity"], Value::Bool(true));
    assert!(f(&d["min_value"]) < 0.0);
    assert!((f(&d["total_mass"]) - 1.0).abs() < 1e-3);
    assert!(dir.path().join("wigner.json").exists());
    assert!(dir.path().join("wigner.mat").exists());
}

#[test]
fn oracle_check_passes_for_cosh() {
    let o = pdmcs(&["oracle", "--family", "cosh", "--alpha", "1", "--a", "-6", "--b", "6", "--n", "3000", "--check"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["levels"].as_array().unwrap().len(), 6);
}

#[test]
fn oracle_check_fails_on_a_coarse_grid() {
    let o = pdmcs(&["oracle", "--family", "cosh", "--alpha", "1", "--a", "-6", "--b", "6", "--n", "40", "--check"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_single_module() {
    let o = pdmcs(&["verify", "--module", "wigner"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(!text.is_empty());
    assert!(text.lines().all(|l| l.contains("[wigner]")), "{text}");
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(pdmcs(&["state", "--family", "rational", "--alpha", "-1", "--out", out]).status.code(), Some(2));
    assert_eq!(pdmcs(&["state", "--z", "1+", "--out", out]).status.code(), Some(2));
    assert_eq!(pdmcs(&["state", "--points", "1", "--x-min", "0", "--x-max", "1", "--out", out]).status.code(), Some(2));
    assert_eq!(pdmcs(&["frobnicate"]).status.code(), Some(2));
}
