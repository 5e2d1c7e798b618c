use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use berezin_core::io::{read_grid_csv, read_manifest};
use berezin_core::schroedinger::truncation_tail;
use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn berezin(args: &[&str]) -> Run {
    let Output { status, stdout, stderr } = Command::new(env!("CARGO_BIN_EXE_berezin"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: status.code().expect("exited normally"),
        stdout: String::from_utf8(stdout).unwrap(),
        stderr: String::from_utf8(stderr).unwrap(),
    }
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_default_config_passes_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"n":1,"lambda":1.0,"M":8}"#);
    let out1 = dir.path().join("o1");
    let out2 = dir.path().join("o2");
    let r = berezin(&["verify", "--config", s(&cfg), "--out", s(&out1)]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    assert!(r.stdout.contains("PASS"));
    let m1 = json(&out1.join("verify_manifest.json"));
    let summary = m1["residual_summary"].as_object().unwrap();
    assert!(summary.len() >= 9);
    let report = json(&out1.join("verify_report.json"));
    let names: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    let mut keys: Vec<&str> = summary.keys().map(String::as_str).collect();
    let mut sorted = names.clone();
    sorted.sort();
    keys.sort();
    assert_eq!(keys, sorted);
    for out in m1["outputs"].as_array().unwrap() {
        assert!(Path::new(out.as_str().unwrap()).exists());
    }

    let r2 = berezin(&["verify", "--config", s(&cfg), "--out", s(&out2), "--json"]);
    assert_eq!(r2.code, 0);
    let m2: Value = serde_json::from_str(&r2.stdout).unwrap();
    assert_eq!(m1["residual_summary"], m2["residual_summary"]);
}

#[test]
fn coarse_grid_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"n":1,"lambda":1.0,"M":4,"G":8}"#);
    let r = berezin(&["verify", "--config", s(&cfg), "--out", s(&dir.path().join("o"))]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("grid too coarse"), "{}", r.stderr);
}

#[test]
fn bad_config_files_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in [
        ("a.json", r#"{"n":1,"lambda":1.0}"#),
        ("b.json", "{"),
        ("c.json", r#"{"n":1,"lambda":1.0,"M":2,"x":0}"#),
    ] {
        let cfg = write(dir.path(), name, text);
        assert_eq!(berezin(&["report", "--config", s(&cfg)]).code, 2, "{name}");
    }
    assert_eq!(berezin(&["report", "--config", "/nonexistent/c.json"]).code, 2);
    assert_eq!(berezin(&["report"]).code, 2);
}

#[test]
fn verify_m1_reports_closed_form_sigma() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"n":1,"lambda":1.0,"M":1}"#);
    let out = dir.path().join("o");
    let r = berezin(&["verify", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert!(r.stdout.contains("sigma_min(M=1) = 0.7071067812"));
    let report = json(&out.join("verify_report.json"));
    let sigma = report["injectivity"][0]["sigma_min"].as_f64().unwrap();
    assert!((sigma - 0.5f64.sqrt()).abs() < 1e-6);
}

fn identity_csv(dim: usize) -> String {
    (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| if i == j { "1,0" } else { "0,0" })
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn symbol_of_identity_and_vacuum_projector() {
    let dir = tempfile::tempdir().unwrap();
    let (lambda, m) = (1.0, 6);
    let cfg = write(dir.path(), "c.json", r#"{"n":1,"lambda":1.0,"M":6}"#);
    let out = dir.path().join("o");

    let id = write(dir.path(), "id.csv", &identity_csv(m));
    let r = berezin(&["symbol", "--config", s(&cfg), "--operator", s(&id), "--out", s(&out)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let manifest = read_manifest(&out.join("symbol.json")).unwrap();
    assert_eq!(manifest.quantity, "berezin_symbol");
    for (x, v) in read_grid_csv(&out.join("symbol.csv")).unwrap() {
        // S(Id)(x) = ‖Pφ_x‖², which is 1 up to the Poisson tail.
        let t = lambda * (x[0] * x[0] + x[1] * x[1]) / 2.0;
        assert!((v.re - (1.0 - truncation_tail(t, m))).abs() < 1e-12);
        assert!(v.im.abs() < 1e-15);
        if t < 0.05 {
            assert!((v.re - 1.0).abs() < manifest.config.tol_identity);
        }
    }

    let mut proj = vec!["0,0"; m * m];
    proj[0] = "1,0";
    let p = write(dir.path(), "p.csv", &proj.join("\n"));
    assert_eq!(
        berezin(&["symbol", "--config", s(&cfg), "--operator", s(&p), "--out", s(&out)]).code,
        0
    );
    for (x, v) in read_grid_csv(&out.join("symbol.csv")).unwrap() {
        let want = (-lambda * (x[0] * x[0] + x[1] * x[1]) / 2.0).exp();
        assert!((v.re - want).abs() < 1e-14 && v.im.abs() < 1e-15);
    }
}

#[test]
fn malformed_operator_files_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"n":1,"lambda":1.0,"M":2}"#);
    let bad = write(dir.path(), "bad.csv", "1,0,0,0\n0,0,x,0\n");
    let r = berezin(&["symbol", "--config", s(&cfg), "--operator", s(&bad)]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 2"), "{}", r.stderr);

    let shape = write(dir.path(), "shape.csv", &identity_csv(3));
    assert_eq!(
        berezin(&["symbol", "--config", s(&cfg), "--operator", s(&shape)]).code,
        2
    );
    let nan = write(dir.path(), "nan.csv", "1,0,0,0\n0,0,inf,0\n");
    assert_eq!(berezin(&["symbol", "--config", s(&cfg), "--operator", s(&nan)]).code, 2);
}

fn wigner_norm(out: &Path) -> (f64, f64) {
    let manifest = read_manifest(&out.join("wigner.json")).unwrap();
    assert_eq!(manifest.chart, "orbit");
    let w = manifest.grid.density * manifest.grid.h.powi(2);
    let rows = read_grid_csv(&out.join("wigner.csv")).unwrap();
    let norm = (rows.iter().map(|(_, v)| v.norm_sqr()).sum::<f64>() * w).sqrt();
    let imag = rows.iter().map(|(_, v)| v.im.abs()).fold(0.0, f64::max);
    (norm, imag)
}

#[test]
fn wigner_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"n":1,"lambda":1.0,"M":4}"#);
    let out = dir.path().join("o");
    let tol = 1e-8;

    let phi = write(dir.path(), "phi.csv", "1,0\n0,0\n0,0\n0,0\n");
    assert_eq!(
        berezin(&["wigner", "--config", s(&cfg), "--state", s(&phi), "--out", s(&out)]).code,
        0
    );
    let (norm, imag) = wigner_norm(&out);
    assert!(imag < tol && (norm - 1.0).abs() < tol);
    assert_eq!(
        read_manifest(&out.join("ambiguity.json")).unwrap().quantity,
        "ambiguity"
    );

    let e1 = write(dir.path(), "e1.csv", "0,0,1,0,0,0,0,0\n");
    assert_eq!(
        berezin(&["wigner", "--config", s(&cfg), "--state", s(&e1), "--out", s(&out)]).code,
        0
    );
    assert!((wigner_norm(&out).0 - 1.0).abs() < tol);

    let zero = write(dir.path(), "z.csv", "0,0\n0,0\n0,0\n0,0\n");
    assert_eq!(
        berezin(&["wigner", "--config", s(&cfg), "--state", s(&zero), "--out", s(&out)]).code,
        0
    );
    assert!(read_grid_csv(&out.join("wigner.csv"))
        .unwrap()
        .iter()
        .all(|(_, v)| v.norm() == 0.0));

    let short = write(dir.path(), "short.csv", "1,0\n");
    assert_eq!(
        berezin(&["wigner", "--config", s(&cfg), "--state", s(&short), "--out", s(&out)]).code,
        2
    );
}

#[test]
fn report_single_and_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"n":1,"lambda":1.0,"M":2}"#);
    let out = dir.path().join("o");
    let r = berezin(&["report", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rep = json(&out.join("injectivity_report.json"));
    assert_eq!(rep["verdict"], "injective-at-truncation");
    for key in ["config", "sigma_min", "sigma_max", "cond", "verdict", "baselines"] {
        assert!(rep.get(key).is_some(), "{key}");
    }

    let r = berezin(&["report", "--config", s(&cfg), "--out", s(&out), "--sweep", "1..4"]);
    assert_eq!(r.code, 0);
    let rows: Vec<&str> = r
        .stdout
        .lines()
        .filter(|l| l.contains("injective-at-truncation"))
        .collect();
    assert_eq!(rows.len(), 4);
    let reps = json(&out.join("injectivity_report.json"));
    assert_eq!(reps.as_array().unwrap().len(), 4);
    assert!(reps
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["sigma_min"].as_f64().unwrap() > 0.0));
}

#[test]
fn underdetermined_report_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"n":1,"lambda":1.0,"M":18,"L":7.1,"G":16}"#);
    let r = berezin(&["report", "--config", s(&cfg), "--out", s(&dir.path().join("o"))]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("324"), "{}", r.stderr);
}
