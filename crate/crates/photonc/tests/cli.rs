//! End-to-end tests driving the compiled binary the way a user would.

use std::process::Output;

use photonc::cli::UnitaryFile;
use photonc::linalg::haar_random_unitary;
use serde_json::Value;

fn photonc(args: &[&str]) -> Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_photonc"))
        .args(args)
        .output()
        .expect("binary launches")
}

fn stdout_json(out: &Output) -> Value {
    assert_eq!(out.status.code(), Some(0), "stderr: {}", text(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn write_identity(path: &std::path::Path, m: usize) {
    let re: Vec<Vec<f64>> = (0..m)
        .map(|r| (0..m).map(|c| if r == c { 1.0 } else { 0.0 }).collect())
        .collect();
    let file = UnitaryFile { m, re, im: vec![vec![0.0; m]; m] };
    std::fs::write(path, serde_json::to_string(&file).unwrap()).unwrap();
}

#[test]
fn compile_reports_the_documented_register_sizes() {
    let out = photonc(&["compile", "--random-modes", "3", "--seed", "42", "--photons", "3"]);
    let report = stdout_json(&out);
    assert_eq!(report["qubit_count"], 6);
    assert_eq!(report["per_element"].as_array().unwrap().len(), 3);
    assert_eq!(report["config"]["modes"], 3);
    assert_eq!(report["config"]["n"], 3);
    assert_eq!(report["config"]["mode"], "pad");
    assert_eq!(report["config"]["seed"], 42);
    assert!(report["max_reconstruction_error"].as_f64().unwrap() < 1e-10);
    let timing = &report["timing"];
    for key in ["matrix_exponentiation_ms", "circuit_synthesis_ms", "total_ms"] {
        assert!(timing[key].as_f64().unwrap() >= 0.0);
    }

    let out = photonc(&["compile", "--random-modes", "5", "--seed", "7", "--photons", "2"]);
    let report = stdout_json(&out);
    assert_eq!(report["qubit_count"], 10);
    assert_eq!(report["per_element"].as_array().unwrap().len(), 10);
}

#[test]
fn compile_then_simulate_round_trips_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let unitary = dir.path().join("identity.json");
    let circuit = dir.path().join("circuit.qasm");
    write_identity(&unitary, 3);

    let out = photonc(&[
        "compile",
        "--unitary",
        unitary.to_str().unwrap(),
        "--photons",
        "2",
        "--out",
        circuit.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", text(&out.stderr));

    let sim_args = |path: &std::path::Path| {
        photonc(&[
            "simulate",
            "--circuit",
            circuit.to_str().unwrap(),
            "--input",
            "1,1,0",
            "--shots",
            "100",
            "--seed",
            "9",
            "--out",
            path.to_str().unwrap(),
        ])
    };
    let first = dir.path().join("sim1.json");
    let second = dir.path().join("sim2.json");
    assert_eq!(sim_args(&first).status.code(), Some(0));
    assert_eq!(sim_args(&second).status.code(), Some(0));
    assert_eq!(
        std::fs::read(&first).unwrap(),
        std::fs::read(&second).unwrap(),
        "same seed must reproduce the report byte for byte"
    );

    let report: Value = serde_json::from_slice(&std::fs::read(&first).unwrap()).unwrap();
    assert_eq!(report["qubit_count"], 6);
    assert_eq!(report["photons"], 2);
    assert!(report["residual"].as_f64().unwrap() < 1e-12);
    let outcomes = report["outcomes"].as_array().unwrap();
    assert_eq!(outcomes.len(), 6, "two photons in three modes");
    for outcome in outcomes {
        let state: Vec<u64> = outcome["state"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_u64().unwrap())
            .collect();
        let p = outcome["probability"].as_f64().unwrap();
        let count = outcome["count"].as_u64().unwrap();
        if state == [1, 1, 0] {
            assert!((p - 1.0).abs() < 1e-12, "identity must keep the input");
            assert_eq!(count, 100);
        } else {
            assert!(p.abs() < 1e-12);
            assert_eq!(count, 0);
        }
    }
}

#[test]
fn verify_agrees_with_the_permanent_oracle() {
    let out = photonc(&[
        "verify",
        "--random-modes",
        "3",
        "--seed",
        "42",
        "--photons",
        "3",
        "--input",
        "2,1,0",
    ]);
    let stdout = text(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", text(&out.stderr));
    assert!(stdout.contains("outcomes: 10"), "stdout: {stdout}");
    assert!(stdout.contains("verification passed"), "stdout: {stdout}");

    let out = photonc(&[
        "verify",
        "--random-modes",
        "5",
        "--seed",
        "7",
        "--photons",
        "2",
        "--input",
        "2,0,0,0,0",
        "--shots",
        "2000",
    ]);
    let stdout = text(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", text(&out.stderr));
    assert!(stdout.contains("outcomes: 15"), "stdout: {stdout}");
    assert!(stdout.contains("sampled total variation"), "stdout: {stdout}");
    assert!(stdout.contains("verification passed"), "stdout: {stdout}");
}

#[test]
fn exit_codes_reflect_failure_classes() {
    let dir = tempfile::tempdir().unwrap();

    let missing = dir.path().join("missing.json");
    let out = photonc(&["compile", "--unitary", missing.to_str().unwrap(), "--photons", "1"]);
    assert_eq!(out.status.code(), Some(1), "missing file is an I/O failure");

    let ones = dir.path().join("ones.json");
    let file = UnitaryFile { m: 2, re: vec![vec![1.0; 2]; 2], im: vec![vec![0.0; 2]; 2] };
    std::fs::write(&ones, serde_json::to_string(&file).unwrap()).unwrap();
    let out = photonc(&["compile", "--unitary", ones.to_str().unwrap(), "--photons", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("deviates"));

    let out = photonc(&["compile", "--random-modes", "2", "--photons", "64"]);
    assert_eq!(out.status.code(), Some(3), "64 photons breach the synthesis guard");

    let identity = dir.path().join("identity.json");
    let circuit = dir.path().join("circuit.qasm");
    write_identity(&identity, 2);
    let out = photonc(&[
        "compile",
        "--unitary",
        identity.to_str().unwrap(),
        "--photons",
        "1",
        "--out",
        circuit.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = photonc(&["simulate", "--circuit", circuit.to_str().unwrap(), "--input", "2,0"]);
    assert_eq!(out.status.code(), Some(2), "occupation above the photon budget");
    let out = photonc(&["simulate", "--circuit", circuit.to_str().unwrap(), "--input", "1,0,0"]);
    assert_eq!(out.status.code(), Some(2), "mode count mismatch");
}

#[test]
fn strict_mode_tightens_ingestion() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("near_unitary.json");
    let mut file = UnitaryFile::from_matrix(&haar_random_unitary(3, 5).unwrap());
    // Large enough to breach the pipeline tolerance, small enough for the
    // ingest projection to absorb.
    file.re[0][0] += 3e-9;
    std::fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();

    let out = photonc(&["compile", "--unitary", path.to_str().unwrap(), "--photons", "1"]);
    let report = stdout_json(&out);
    assert!(
        report["config"].get("seed").is_none(),
        "file-sourced compiles must not echo a seed"
    );

    let out = photonc(&[
        "compile",
        "--unitary",
        path.to_str().unwrap(),
        "--photons",
        "1",
        "--strict",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("deviates"));
}

#[test]
fn scaling_emits_the_documented_schema() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("scaling.csv");
    let out = photonc(&[
        "scaling",
        "--modes",
        "2",
        "--photons-list",
        "1,2",
        "--samples",
        "2",
        "--seed",
        "3",
        "--csv",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", text(&out.stderr));

    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "n,sample,qubits,depth,cnot_count,matrix_exponentiation_ms,circuit_synthesis_ms"
    );
    assert_eq!(lines.len(), 5, "header plus 2 budgets x 2 samples");
    for (i, line) in lines[1..].iter().enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 7);
        let n: usize = fields[0].parse().unwrap();
        let sample: usize = fields[1].parse().unwrap();
        let qubits: usize = fields[2].parse().unwrap();
        assert_eq!(n, [1, 1, 2, 2][i]);
        assert_eq!(sample, i % 2);
        assert_eq!(qubits, if n == 1 { 2 } else { 4 });
        assert!(fields[3].parse::<usize>().is_ok());
        assert!(fields[4].parse::<usize>().is_ok());
        assert!(fields[5].parse::<f64>().unwrap() >= 0.0);
        assert!(fields[6].parse::<f64>().unwrap() >= 0.0);
    }
}
