use std::process::{Command, Output};

use eisenlab::recipe::{main_prediction, threshold_scan, ChiKind};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_eisenlab"));
    cmd.args(args).env_remove("EISENLAB_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn temp_file(name: &str, body: &str) -> std::path::PathBuf {
    let p = std::env::temp_dir().join(format!("eisenlab-{}-{name}", std::process::id()));
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn core_suite_passes() {
    let o = run(&["verify", "--suite", "core"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS"));
}

#[test]
fn json_records_carry_report_fields_and_are_reproducible() {
    let args = [
        "verify", "--suite", "core", "--format", "json", "--seed", "3", "--points", "4",
    ];
    let a = json(&run(&args));
    let b = json(&run(&args));
    assert_eq!(a["schema"], 1);
    let recs = a["records"].as_array().unwrap();
    assert!(recs.len() > 8);
    for key in [
        "check_name",
        "lhs",
        "rhs",
        "abs_err",
        "rel_err",
        "tolerance",
        "pass",
        "metadata",
    ] {
        assert!(recs[0].get(key).is_some(), "missing {key}");
    }
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("generated_at");
        v
    };
    assert_eq!(strip(a), strip(b));
    // a different seed moves the random points
    let c = json(&run(&[
        "verify",
        "--format",
        "json",
        "--seed",
        "4",
        "--points",
        "4",
        "--only",
        "ramanujan",
    ]));
    let d = json(&run(&[
        "verify",
        "--format",
        "json",
        "--seed",
        "3",
        "--points",
        "4",
        "--only",
        "ramanujan",
    ]));
    assert_ne!(c["records"], d["records"]);
}

#[test]
fn perturbation_is_detected() {
    for kernel in ["dbw", "mellin-pair", "triple-route"] {
        let o = run(&[
            "verify",
            "--perturb",
            "1e-3",
            "--perturb-kernel",
            kernel,
            "--format",
            "json",
        ]);
        assert_eq!(o.status.code(), Some(1), "{kernel}");
        let v = json(&o);
        assert_eq!(v["pass"], false);
        let failed = v["records"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|r| r["pass"] == false)
            .count();
        assert!(failed >= 1);
    }
}

#[test]
fn config_file_rules() {
    let good = temp_file(
        "good.cfg",
        "[verify]\nseed = 5\npoints = 2\n[sweep]\nwhat = prediction\n",
    );
    let o = run(&[
        "verify",
        "--config",
        good.to_str().unwrap(),
        "--seed",
        "8",
        "--format",
        "json",
        "--only",
        "dbw",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["seed"], 8);

    let bad = temp_file("bad.cfg", "[verify]\nseed = 5\nponts = 2\n");
    let o = run(&["verify", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 3") && err.contains("ponts"), "{err}");
    std::fs::remove_file(good).ok();
    std::fs::remove_file(bad).ok();
}

#[test]
fn thread_env_var() {
    let o = run_env(&["verify", "--only", "corollary"], &[("EISENLAB_THREADS", "1")]);
    assert_eq!(o.status.code(), Some(0));
    let o = run_env(&["verify", "--only", "corollary"], &[("EISENLAB_THREADS", "0")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn prediction_sweep_csv_and_json_agree() {
    let base = ["sweep", "--what", "prediction", "--N", "101,211,401", "--T", "0"];
    let csv = stdout(&run(&[&base[..], &["--format", "csv"]].concat()));
    let js = json(&run(&[&base[..], &["--format", "json"]].concat()));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    let header: Vec<&str> = lines[0].split(',').collect();
    let col = header.iter().position(|h| *h == "main_prediction").unwrap();
    let mut prev = f64::INFINITY;
    for (i, line) in lines[1..].iter().enumerate() {
        let cell = line.split(',').nth(col).unwrap();
        assert_eq!(cell, js["records"][i]["main_prediction"].to_string());
        let n = js["records"][i]["N"].as_u64().unwrap();
        let v: f64 = cell.parse().unwrap();
        assert_eq!(v, main_prediction(n, 0.0, ChiKind::Quadratic));
        assert!(v < prev);
        prev = v;
    }
}

#[test]
fn threshold_sweep_delegates() {
    let js = json(&run(&[
        "sweep",
        "--what",
        "threshold",
        "--N",
        "5",
        "--T",
        "0,0.1,2",
        "--format",
        "json",
    ]));
    let rows = threshold_scan(5, &[0.0, 0.1, 2.0]);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(js["records"][i]["bracket"].as_f64().unwrap(), r.bracket);
    }
}

#[test]
fn moment_commands() {
    let o = run(&["moment", "sweep", "--N", "5,13", "--Y", "2", "--out", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(
        out.lines().next().unwrap(),
        "N,Y,route,value_re,value_im,err_bound,runtime_ms"
    );
    assert_eq!(out.lines().count(), 1 + 2 * 4);

    let o = run(&[
        "moment",
        "pipeline",
        "--N",
        "5",
        "--Y",
        "2",
        "--routes",
        "quadrature,saddle_line",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    // the literal contour route loses its digits to cancellation
    let o = run(&["moment", "pipeline", "--N", "5", "--Y", "2", "--routes", "all"]);
    assert_eq!(o.status.code(), Some(1));

    let o = run(&["moment", "pipeline", "--N", "15"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("not prime"));
}

#[test]
fn small_commands() {
    let v = json(&run(&["lvalue", "--chi", "4:1", "--s", "1", "--format", "json"]));
    let l = v["records"][0]["L_re"].as_f64().unwrap();
    assert!((l - std::f64::consts::PI / 4.0).abs() < 1e-12, "{l}");

    let v = json(&run(&["geom", "cusps", "--N", "6", "--format", "json"]));
    assert_eq!(v["records"].as_array().unwrap().len(), 4);

    let o = run(&["eis", "oracle", "--chi", "13:quad", "--s", "2", "--z", "0.1,1.2"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["recipe", "corollary", "--N", "101", "--T", "1", "--kind", "complex"]);
    assert_eq!(o.status.code(), Some(0));
}
