use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn netwit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netwit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad json ({e}): {}\n{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

// reports print 13 significant digits
fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn pbd_reconstruction_passes() {
    let out = netwit(&[
        "verify",
        "reconstruction",
        "--family",
        "pbd",
        "--d",
        "3",
        "--lambda",
        "2/3,1/3,0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert!(f(&v["outputs"]["max_abs_error"]) <= 1e-9);
    assert_eq!(v["inputs"]["lambda"][0], "2/3");
    assert!((f(&v["inputs"]["lambda_values"][0]) - 2.0 / 3.0).abs() < 1e-12);
    assert_eq!(v["ok"], true);
}

#[test]
fn wrong_eta_fails_verification() {
    let out = netwit(&[
        "verify",
        "reconstruction",
        "--family",
        "flip",
        "--eta",
        "1/2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_of(&out)["outputs"]["pass"], false);
}

#[test]
fn psi_minus_run() {
    let out = netwit(&[
        "protocol",
        "run",
        "--family",
        "two-qubit",
        "--state",
        "psi-minus",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let o = &json_of(&out)["outputs"];
    assert_eq!(o["verdict"], "detected");
    assert!((f(&o["bell_signal"]) - 0.25).abs() < 1e-12);
    assert!((f(&o["bell_threshold"]) - 0.125).abs() < 1e-12);
    assert!((f(&o["singlet_fraction"]) - 1.0).abs() < 1e-12);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["protocol", "shots", "--family", "two-qubit", "--shots", "0"][..],
        &["protocol", "run", "--family", "two-qubit", "--frobnicate"],
        &["protocol", "run", "--family", "nonsense"],
        &["protocol", "run", "--family", "two-qubit", "--d", "3"],
        &[
            "protocol",
            "run",
            "--family",
            "choi",
            "--state",
            "psi-minus",
        ],
        &[
            "verify",
            "reconstruction",
            "--family",
            "pbd",
            "--lambda",
            "1/2,1/0",
        ],
        &[
            "verify",
            "reconstruction",
            "--family",
            "pbd",
            "--lambda",
            "1/2,1/4",
        ],
        &["verify", "ppt", "--family", "flip", "--require-ppt", "X:Y"],
        &["graph", "demo", "--labels", "0000,0000"],
        &["frobnicate"],
    ] {
        let out = netwit(args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn invalid_witness_lambda_is_a_verification_failure() {
    let out = netwit(&["witness", "build", "--family", "pbd", "--lambda", "0,1,0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn shot_reports_are_reproducible_and_echo_seed() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let path = dir.path().join(name);
        let out = netwit(&[
            "protocol",
            "shots",
            "--family",
            "choi",
            "--state",
            "random",
            "--shots",
            "20000",
            "--seed",
            seed,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        std::fs::read(path).unwrap()
    };
    let a = run("a.json", "11");
    let b = run("b.json", "11");
    let c = run("c.json", "12");
    assert_eq!(a, b);
    assert_ne!(a, c);
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["inputs"]["seed"], 11);
    assert_eq!(v["outputs"]["shots"]["seed"], 11);
    assert_eq!(v["outputs"]["shots"]["n_total"], 20000);
}

#[test]
fn csv_header_is_stable() {
    let args = [
        "protocol",
        "run",
        "--family",
        "reduction",
        "--d",
        "2",
        "--seed",
        "4",
        "--format",
        "csv",
    ];
    let a = netwit(&args);
    let b = netwit(&[
        "protocol",
        "run",
        "--family",
        "reduction",
        "--d",
        "2",
        "--seed",
        "9",
        "--format",
        "csv",
    ]);
    assert_eq!(a.status.code(), Some(0));
    let ha = String::from_utf8(a.stdout).unwrap();
    let hb = String::from_utf8(b.stdout).unwrap();
    assert_eq!(ha.lines().count(), 2);
    assert_eq!(ha.lines().next(), hb.lines().next());
    assert_ne!(ha.lines().nth(1), hb.lines().nth(1));
    assert!(ha
        .lines()
        .next()
        .unwrap()
        .contains("outputs.singlet_fraction"));
}

#[test]
fn reports_embed_version_and_tolerances() {
    let out = netwit(&["network", "build", "--family", "flip", "--d", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert!(f(&v["tolerances"]["reconstruction"]) > 0.0);
    assert!(f(&v["outputs"]["reconstruction_error"]) <= 1e-9);
    assert_eq!(
        v["outputs"]["network"]["state"]["dims"],
        serde_json::json!([2, 2, 2, 2])
    );
}

#[test]
fn witness_build_reports_floor() {
    let out = netwit(&["witness", "build", "--family", "choi", "--restarts", "16"]);
    assert_eq!(out.status.code(), Some(0));
    let o = &json_of(&out)["outputs"];
    assert!(f(&o["sep_floor"]["value"]) >= -1e-6);
    assert_eq!(o["cyclic"]["pass"], true);
    assert!(f(&o["min_eigenvalue"]) < 0.0);
}

#[test]
fn ppt_requirements() {
    let ok = netwit(&[
        "verify",
        "ppt",
        "--family",
        "flip",
        "--d",
        "3",
        "--require-ppt",
        "A2A3:B2B3",
    ]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = netwit(&[
        "verify",
        "ppt",
        "--family",
        "reduction",
        "--d",
        "3",
        "--require-ppt",
        "A2A3:B2B3",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    let npt = netwit(&[
        "verify",
        "ppt",
        "--family",
        "reduction",
        "--d",
        "3",
        "--require-npt",
        "A2A3:B2B3",
    ]);
    assert_eq!(npt.status.code(), Some(0));
    let cuts = json_of(&npt)["outputs"]["cuts"].as_array().unwrap().len();
    assert_eq!(cuts, 7);
}

#[test]
fn scan_and_graph_demo() {
    let scan = netwit(&[
        "scan",
        "choi-bound-entangled",
        "--resolution",
        "12",
        "--seed",
        "3",
    ]);
    assert_eq!(scan.status.code(), Some(0));
    let v = json_of(&scan);
    assert_eq!(v["outputs"]["scan"]["found"], true);
    assert!(f(&v["outputs"]["protocol"]["singlet_fraction"]) > 2.0 / 3.0);

    let demo = netwit(&["graph", "demo"]);
    assert_eq!(demo.status.code(), Some(0));
    let o = &json_of(&demo)["outputs"];
    assert!((f(&o["witness_expectation"]) + 0.5).abs() < 1e-12);
    assert!((f(&o["protocol"]["recon_constant"]) - 1.0 / 12.0).abs() < 1e-12);
}

#[test]
fn graph_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    std::fs::write(&path, r#"{"n": 3, "edges": [[1, 2], [1, 3]]}"#).unwrap();
    let out = netwit(&[
        "graph",
        "demo",
        "--graph",
        path.to_str().unwrap(),
        "--labels",
        "000,001,010",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json_of(&out);
    assert_eq!(v["inputs"]["graph"]["n"], 3);
    assert_eq!(v["outputs"]["protocol"]["verdict"], "detected");
}

#[test]
fn unwritable_out_path() {
    let out = netwit(&[
        "protocol",
        "run",
        "--family",
        "flip",
        "--out",
        "/nonexistent/dir/r.json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!Path::new("/nonexistent/dir/r.json").exists());
}
