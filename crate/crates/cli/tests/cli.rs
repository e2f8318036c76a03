use std::process::{Command, Output};

use serde_json::Value;

fn freeclt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freeclt"))
        .args(args)
        .env_remove("FREECLT_BITS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn c0_report() {
    let o = freeclt(&["c0", "--sigma2", "1"]);
    assert!(o.status.success());
    let v = json(&o);
    assert!((v["c0"].as_f64().unwrap() - 2.0805).abs() < 5e-5);
    assert!((v["alpha0"].as_f64().unwrap() - 1.0034).abs() < 5e-4);
    assert!((v["normal_saddle"]["kappa"].as_f64().unwrap() - 0.62).abs() < 5e-3);
    let m = &v["manifest"];
    assert_eq!(m["subcommand"], "c0");
    assert_eq!(m["precision_bits"], 256);
    assert_eq!(m["seed"], 0);
    assert!(m["wall_time_s"].is_number());
    assert!(m["version"].is_string());
}

#[test]
fn moments_table() {
    let o = freeclt(&["moments", "--kmax", "3", "--sigma2", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,value"));
    let want = [1.6487, 5.4366, 24.6493];
    for (line, w) in lines.zip(want) {
        let v: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((v - w).abs() < 1e-4, "{line}");
    }
    // The manifest sidecar goes to stderr when the CSV goes to stdout.
    let side: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(side["manifest"]["subcommand"], "moments");
}

#[test]
fn moment_methods_agree() {
    let run = |m: &str| stdout(&freeclt(&["moments", "--kmax", "12", "--sigma2", "1/4", "--method", m]));
    let laguerre = run("laguerre");
    assert_eq!(laguerre, run("sum"));
    assert_eq!(laguerre, run("chi"));
}

#[test]
fn exact_log_moments() {
    let o = freeclt(&["log-moments", "--kmax", "2", "--exact"]);
    assert_eq!(stdout(&o), "k,value\n1,13/12\n2,563/240\n");
}

#[test]
fn series_verify_passes() {
    let v = json(&freeclt(&["series-verify"]));
    for key in ["g3", "g4", "h3", "h4", "limit_S"] {
        assert_eq!(v[key], "pass", "{key}");
    }
    assert_eq!(v["all_pass"], true);
}

#[test]
fn radius_csv() {
    let o = freeclt(&["radius", "--kind", "log", "--kmax", "4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("k,r_k\n1,"));
    assert_eq!(text.lines().count(), 5);
    let r1: f64 = text.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((r1 - 2.0 * (13.0f64 / 12.0).sqrt()).abs() < 1e-12);
}

#[test]
fn mgf_is_even() {
    let text = stdout(&freeclt(&["mgf", "--smin", "-2", "--smax", "2", "--points", "5"]));
    let vals: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(vals.len(), 5);
    assert!((vals[0] - vals[4]).abs() <= 1e-12 * vals[0]);
    assert!((vals[2] - 1.0).abs() < 1e-15);
}

#[test]
fn exit_codes() {
    let o = freeclt(&["c0", "--no-such-flag"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));

    assert_eq!(freeclt(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(freeclt(&["c0", "--sigma2", "-1"]).status.code(), Some(1));
    assert_eq!(freeclt(&["c0", "--sigma2", "abc"]).status.code(), Some(1));
    assert_eq!(freeclt(&["c0", "--bits", "16"]).status.code(), Some(1));

    // 64 bits cannot certify order-24 differences.
    let o = freeclt(&["monotone", "--K", "60", "--J", "24", "--bits", "64"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("precision"));

    assert_eq!(freeclt(&["--help"]).status.code(), Some(0));
}

#[test]
fn precision_from_environment() {
    let run = |env: Option<&str>, args: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_freeclt"));
        c.args(args).env_remove("FREECLT_BITS");
        if let Some(b) = env {
            c.env("FREECLT_BITS", b);
        }
        let o = c.output().unwrap();
        json(&o)["manifest"]["precision_bits"].as_u64().unwrap()
    };
    assert_eq!(run(None, &["c0"]), 256);
    assert_eq!(run(Some("512"), &["c0"]), 512);
    assert_eq!(run(Some("512"), &["c0", "--bits", "128"]), 128);
}

#[test]
fn monotone_report() {
    let v = json(&freeclt(&["monotone", "--K", "40", "--J", "16", "--bits", "512", "--no-timing"]));
    assert_eq!(v["pass"], true);
    assert!(v["first_violation"].is_null());
    assert!(v["min_margin"].as_f64().unwrap() > v["min_margin_error"].as_f64().unwrap());
    assert!(v.get("runtime_s").is_none());
    assert!(v["manifest"].get("wall_time_s").is_none());
}

#[test]
fn simulate_writes_histogram_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("hist.csv");
    let out_s = out.to_str().unwrap();
    let args = [
        "simulate", "--dim", "24", "--factors", "6", "--trials", "4", "--bins", "21", "--seed", "42", "--no-timing",
        "--out", out_s,
    ];
    let o = freeclt(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());

    let csv = std::fs::read_to_string(&out).unwrap();
    let side_path = format!("{out_s}.json");
    let side = std::fs::read_to_string(&side_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("bin_left,bin_right,density"));
    let mass: f64 = lines
        .map(|l| {
            let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (f[1] - f[0]) * f[2]
        })
        .sum();
    assert!((mass - 1.0).abs() < 1e-10);

    let v: Value = serde_json::from_str(&side).unwrap();
    assert_eq!(v["eigenvalues"], 96);
    assert_eq!(v["config"]["seed"], 42);
    assert_eq!(v["manifest"]["subcommand"], "simulate");
    assert_eq!(v["moments"][0]["k"], 1);
    assert!(v["max_abs_log"].as_f64().unwrap() > 0.0);

    // Same manifest, same bytes.
    assert!(freeclt(&args).status.success());
    assert_eq!(std::fs::read_to_string(&out).unwrap(), csv);
    assert_eq!(std::fs::read_to_string(&side_path).unwrap(), side);
}

#[test]
fn density_grid() {
    let text = stdout(&freeclt(&["density", "--points", "3", "--normalize"]));
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "t,density");
    assert_eq!(rows[1], "-1,0");
    assert!(rows[2].starts_with("0,0.6366"));
}
