use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn wstate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wstate"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, value: &Value) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, value.to_string()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn probabilities(state: &Value) -> Vec<f64> {
    state["amplitudes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c[0].as_f64().unwrap().powi(2) + c[1].as_f64().unwrap().powi(2))
        .collect()
}

fn perfect_w4() -> Value {
    let a = 1.0 / 6f64.sqrt();
    json!({"n": 4, "amplitudes": [[a, 0.0], [a, 0.0], [a, 0.0], [0.5f64.sqrt(), 0.0]]})
}

#[test]
fn evolve_chain_and_round_trip() {
    let dir = TempDir::new().unwrap();
    let lattice = write(
        &dir,
        "chain.json",
        &json!({"type": "chain", "n": 4, "couplings": [1.2043, 0.686372, 0.781121]}),
    );
    let first = dir.path().join("first.json");
    let out = wstate(&[
        "evolve",
        s(&lattice),
        "--z",
        "1.15042",
        "--input-mode",
        "3",
        "--out",
        s(&first),
    ]);
    assert!(out.status.success());
    let state: Value = serde_json::from_str(&fs::read_to_string(&first).unwrap()).unwrap();
    for (p, t) in probabilities(&state)
        .iter()
        .zip([1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0, 0.5])
    {
        assert!((p - t).abs() < 2e-3);
    }
    // Evolving by zero from the written state reproduces it byte for byte.
    let second = dir.path().join("second.json");
    let out = wstate(&[
        "evolve",
        s(&lattice),
        "--z",
        "0",
        "--state",
        s(&first),
        "--out",
        s(&second),
    ]);
    assert!(out.status.success());
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
}

#[test]
fn verify_perfect_w() {
    let dir = TempDir::new().unwrap();
    let state = write(&dir, "w.json", &perfect_w4());
    let report = stdout_json(&wstate(&["verify", s(&state)]));
    assert_eq!(report["verdict"], "entangled");
    assert!((report["separability_witness"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn verify_counterexample_with_and_without_alphas() {
    let dir = TempDir::new().unwrap();
    let state = write(
        &dir,
        "s.json",
        &json!({"n": 5, "amplitudes": [[1, 0], [1, 0], [-1, 0], [-1, 0], [2, 0]]}),
    );
    let rejected = wstate(&["verify", s(&state)]);
    assert_eq!(rejected.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&rejected.stderr).contains("not normalized"));

    let uniform = write(
        &dir,
        "a.json",
        &json!({"alphas": [[0.5, 0], [0.5, 0], [0.5, 0], [0.5, 0]]}),
    );
    let report = stdout_json(&wstate(&[
        "verify",
        s(&state),
        "--renormalize",
        "--alphas",
        s(&uniform),
    ]));
    assert_eq!(report["verdict"], "not-detected");
    assert!(report["coherence"].as_f64().unwrap() < 1e-30);

    let report = stdout_json(&wstate(&["verify", s(&state), "--renormalize"]));
    assert_eq!(report["verdict"], "entangled");
}

#[test]
fn synthesize_four_mode_profile() {
    let dir = TempDir::new().unwrap();
    let problem = write(
        &dir,
        "p.json",
        &json!({"n": 4, "input_mode": 3, "target_probs": [1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0, 0.5]}),
    );
    let a = stdout_json(&wstate(&["synthesize", s(&problem), "--seed", "5"]));
    assert!(a["residual"].as_f64().unwrap() < 1e-6);
    assert_eq!(a["converged"], true);
    let b = stdout_json(&wstate(&["synthesize", s(&problem), "--seed", "5"]));
    assert_eq!(a, b);
}

#[test]
fn ring_geometry_limits() {
    let g = stdout_json(&wstate(&["ring-geometry", "7"]));
    assert!((g["r_over_d0"].as_f64().unwrap() - 7.35791).abs() < 1e-4);
    assert_eq!(wstate(&["ring-geometry", "6"]).status.code(), Some(1));
    assert_eq!(wstate(&["ring-geometry", "13"]).status.code(), Some(1));
    assert!(wstate(&["ring-geometry", "13", "--allow-second-neighbor"])
        .status
        .success());
}

#[test]
fn trace_ring_csv() {
    let dir = TempDir::new().unwrap();
    let c = 1.0;
    let lattice = write(
        &dir,
        "ring.json",
        &json!({"type": "ring", "n_ring": 7, "kappa": c / 7f64.sqrt(), "c": c}),
    );
    let out = wstate(&["trace", s(&lattice), "--z-max", "3", "--points", "31"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("z,p_1,p_2,p_3,p_4,p_5,p_6,p_7,p_8"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 31);
    assert_eq!(rows[0][8], 1.0);
    for row in &rows {
        assert!((row[1..].iter().sum::<f64>() - 1.0).abs() < 1e-10);
        // The hub never drops below one half on resonance.
        assert!(row[8] >= 0.5 - 1e-12);
    }
}

#[test]
fn circuit_design_generate_measure() {
    let dir = TempDir::new().unwrap();
    let alphas = write(&dir, "a.json", &json!({"alphas": [[0.6, 0.0], [0.0, 0.8]]}));
    let spec = dir.path().join("spec.json");
    let netlist = dir.path().join("netlist.json");
    let out = wstate(&[
        "circuit-design",
        s(&alphas),
        "--out",
        s(&spec),
        "--netlist",
        s(&netlist),
    ]);
    assert!(out.status.success());
    let stages: Value = serde_json::from_str(&fs::read_to_string(&netlist).unwrap()).unwrap();
    assert_eq!(stages.as_array().unwrap().len(), 5);

    let state = dir.path().join("w.json");
    assert!(wstate(&[
        "circuit-generate",
        s(&spec),
        "--port",
        "b",
        "--out",
        s(&state)
    ])
    .status
    .success());
    let m = stdout_json(&wstate(&[
        "circuit-measure",
        s(&spec),
        s(&state),
        "--phi-n",
        &std::f64::consts::FRAC_PI_2.to_string(),
    ]));
    assert!((m["diff"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((m["sum"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let bad_port = wstate(&["circuit-generate", s(&spec), "--port", "x"]);
    assert_eq!(bad_port.status.code(), Some(2));
}

#[test]
fn oracle_suite_csv_is_deterministic() {
    let run = || {
        wstate(&[
            "oracle-suite",
            "--samples",
            "12",
            "--modes",
            "3,4",
            "--seed",
            "8",
        ])
    };
    let a = run();
    assert!(a.status.success());
    assert_eq!(a.stdout, run().stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("seed,sum_var,bound,lhs21,rhs21,violates")
    );
    assert!(lines.all(|l| l.ends_with(",false")));
}

#[test]
fn error_exit_codes() {
    let dir = TempDir::new().unwrap();
    let garbage = dir.path().join("bad.json");
    fs::write(&garbage, "{not json").unwrap();
    let out = wstate(&["verify", s(&garbage)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    assert_eq!(
        wstate(&["verify", "/nonexistent/state.json"]).status.code(),
        Some(2)
    );
    assert_eq!(wstate(&["frobnicate"]).status.code(), Some(2));

    let basis = write(
        &dir,
        "basis.json",
        &json!({"n": 3, "amplitudes": [[0, 0], [0, 0], [1, 0]]}),
    );
    let out = wstate(&["verify", s(&basis)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("wstate: error:"));

    let lattice = write(
        &dir,
        "chain.json",
        &json!({"type": "chain", "n": 3, "couplings": [1.0, 1.0]}),
    );
    assert_eq!(
        wstate(&["evolve", s(&lattice), "--z=-1"]).status.code(),
        Some(1)
    );
    assert_eq!(
        wstate(&["evolve", s(&lattice), "--z", "1", "--input-mode", "4"])
            .status
            .code(),
        Some(1)
    );
}
