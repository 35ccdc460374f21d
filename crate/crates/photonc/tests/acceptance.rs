//! Acceptance gate: one end-to-end criterion per line, printed pass or fail.
//!
//! This target runs without the default test harness so every criterion
//! reports even under plain `cargo test`. The process exits nonzero when any
//! criterion fails; all nine run regardless.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_complex::Complex64;
use photonc::circuit::compile;
use photonc::clements::{decompose, reconstruct};
use photonc::fock::{
    enumerate_fock_states, truncated_two_mode_unitary, ExpansionMode, FockState, TruncationConfig,
};
use photonc::linalg::{haar_random_unitary, mat_from_rows, max_abs_diff, ComplexMatrix};
use photonc::oracle::{exact_distribution, naive_permanent, permanent};
use photonc::sim::{probabilities, run, sample, StateVector};
use photonc::synth::{synthesize, SynthesisResult};
use photonc::InterferometerSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

struct Criterion {
    name: &'static str,
    /// Wall-clock bound in seconds, when the contract states one.
    budget_s: Option<f64>,
    run: fn() -> Result<String, String>,
}

fn main() {
    let criteria = [
        Criterion {
            name: "closed-form beamsplitter lift",
            budget_s: Some(1.0),
            run: closed_form_beamsplitter_lift,
        },
        Criterion {
            name: "interferometer decomposition round trip",
            budget_s: Some(10.0),
            run: decomposition_round_trip,
        },
        Criterion {
            name: "three-mode three-photon distribution",
            budget_s: Some(60.0),
            run: three_mode_three_photon,
        },
        Criterion {
            name: "five-mode two-photon distribution",
            budget_s: Some(60.0),
            run: five_mode_two_photon,
        },
        Criterion { name: "circuit depth bands", budget_s: None, run: depth_bands },
        Criterion {
            name: "two-photon interference dip",
            budget_s: Some(5.0),
            run: two_photon_interference,
        },
        Criterion { name: "invariant suites", budget_s: None, run: invariant_suites },
        Criterion {
            name: "photon-budget scaling sweep",
            budget_s: Some(600.0),
            run: scaling_sweep,
        },
        Criterion { name: "sampling statistics", budget_s: None, run: sampling_statistics },
    ];

    let mut failures = 0;
    for (i, criterion) in criteria.iter().enumerate() {
        let number = i + 1;
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(criterion.run))
            .unwrap_or_else(|payload| Err(format!("panicked: {}", panic_text(&payload))));
        let elapsed = started.elapsed().as_secs_f64();
        let over_budget = criterion.budget_s.is_some_and(|budget| elapsed > budget);
        match outcome {
            Ok(detail) if !over_budget => {
                println!(
                    "acceptance criterion {number} [PASS] {}: {detail} ({elapsed:.2}s)",
                    criterion.name
                );
            }
            Ok(detail) => {
                failures += 1;
                println!(
                    "acceptance criterion {number} [FAIL] {}: {elapsed:.2}s over the \
                     {:.0}s budget; {detail}",
                    criterion.name,
                    criterion.budget_s.unwrap()
                );
            }
            Err(message) => {
                failures += 1;
                println!(
                    "acceptance criterion {number} [FAIL] {}: {message} ({elapsed:.2}s)",
                    criterion.name
                );
            }
        }
    }

    if failures > 0 {
        eprintln!("acceptance: {failures} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("acceptance: all {} criteria passed", criteria.len());
}

fn panic_text(payload: &Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "non-string panic payload".to_string()
    }
}

fn lib<T>(r: photonc::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn haar_spec(m: usize, seed: u64) -> Result<InterferometerSpec, String> {
    lib(haar_random_unitary(m, seed).and_then(InterferometerSpec::new))
}

/// Replay a synthesized gate list through the public simulator, column by
/// column, and compare to the target up to the recorded global phase.
fn replay_error(result: &SynthesisResult, target: &ComplexMatrix) -> Result<f64, String> {
    let dim = target.nrows();
    let phase = Complex64::new(0.0, result.global_phase).exp();
    let mut worst = 0.0f64;
    for col in 0..dim {
        let mut v = lib(StateVector::basis(result.qubits, col))?;
        for gate in &result.gates {
            v.apply(gate);
        }
        for row in 0..dim {
            worst = worst.max((target[(row, col)] - phase * v.amplitudes[row]).norm());
        }
    }
    Ok(worst)
}

/// Criterion 1: for 20 (θ, φ) pairs the n = 2 truncated beamsplitter unitary
/// must reproduce the hand-derived closed form entrywise to 1e−12, padded mode
/// on the occupied 3×3 block of registers, expanded mode on every sector the
/// higher cutoff leaves intact.
fn closed_form_beamsplitter_lift() -> Result<String, String> {
    const TOL: f64 = 1e-12;
    let pad = TruncationConfig::new(2, ExpansionMode::PadToPowerOfTwo);
    let expand = TruncationConfig::new(2, ExpansionMode::ExpandTruncation);
    let mut worst = 0.0f64;
    for (theta, phi) in common::angle_samples(20) {
        let t = common::simple_beamsplitter(theta, phi);
        let reference = common::reference_two_mode_n2(theta, phi);

        let padded = lib(truncated_two_mode_unitary(&t, &pad))?;
        for s1 in 0..3 {
            for s0 in 0..3 {
                for t1 in 0..3 {
                    for t0 in 0..3 {
                        let got = padded[(s0 + 4 * s1, t0 + 4 * t1)];
                        let want = reference[(s0 + 3 * s1, t0 + 3 * t1)];
                        worst = worst.max((got - want).norm());
                    }
                }
            }
        }

        let expanded = lib(truncated_two_mode_unitary(&t, &expand))?;
        for row in 0..16 {
            let (r0, r1) = (row % 4, row / 4);
            if r0 + r1 > 2 {
                continue;
            }
            for col in 0..16 {
                let (c0, c1) = (col % 4, col / 4);
                if c0 + c1 > 2 {
                    continue;
                }
                let got = expanded[(row, col)];
                let want = reference[(r0 + 3 * r1, c0 + 3 * c1)];
                worst = worst.max((got - want).norm());
            }
        }
    }
    if worst > TOL {
        return Err(format!("entry error {worst:.3e} over {TOL:.0e}"));
    }
    Ok(format!("20 angle pairs, both register modes, max entry error {worst:.3e}"))
}

/// Criterion 2: decompose and rebuild 100 Haar-random interferometers on
/// 2 through 8 modes; worst entrywise error at most 1e−10.
fn decomposition_round_trip() -> Result<String, String> {
    const TOL: f64 = 1e-10;
    let mut worst = 0.0f64;
    for i in 0..100u64 {
        let m = 2 + (i as usize) % 7;
        let u = lib(haar_random_unitary(m, 1000 + i))?;
        let spec = lib(InterferometerSpec::new(u.clone()))?;
        worst = worst.max(max_abs_diff(&reconstruct(&decompose(&spec)), &u));
    }
    if worst > TOL {
        return Err(format!("reconstruction error {worst:.3e} over {TOL:.0e}"));
    }
    Ok(format!("100 unitaries on 2..=8 modes, max error {worst:.3e}"))
}

/// Criterion 3: a random 3-mode interferometer with three photons in (2,1,0)
/// compiles to exactly 6 qubits and all 10 output probabilities match the
/// permanent oracle within 1e−9.
fn three_mode_three_photon() -> Result<String, String> {
    const TOL: f64 = 1e-9;
    let spec = haar_spec(3, 42)?;
    let config = TruncationConfig::new(3, ExpansionMode::PadToPowerOfTwo);
    let compiled = lib(compile(&spec, &config))?;
    if compiled.circuit.qubits != 6 {
        return Err(format!("expected 6 qubits, compiled {}", compiled.circuit.qubits));
    }
    let input = FockState::new(vec![2, 1, 0]);
    let v = lib(run(&compiled.circuit, &input))?;
    let dist = probabilities(&v, 3, &config, 3);
    let oracle = lib(exact_distribution(&spec, &input))?;
    if oracle.entries.len() != 10 {
        return Err(format!("expected 10 outcomes, oracle lists {}", oracle.entries.len()));
    }
    let mut worst = dist.residual;
    for (state, &want) in &oracle.entries {
        worst = worst.max((dist.probability(state) - want).abs());
    }
    if worst > TOL {
        return Err(format!("probability error {worst:.3e} over {TOL:.0e}"));
    }
    Ok(format!("6 qubits, 10 outcomes vs permanent oracle, max error {worst:.3e}"))
}

/// Criterion 4: a random 5-mode interferometer with two photons in
/// (2,0,0,0,0) compiles to exactly 10 qubits; the 15 outcomes match the
/// oracle within 1e−9 and their probabilities sum to 1 within 1e−10.
fn five_mode_two_photon() -> Result<String, String> {
    const TOL: f64 = 1e-9;
    let spec = haar_spec(5, 7)?;
    let config = TruncationConfig::new(2, ExpansionMode::PadToPowerOfTwo);
    let compiled = lib(compile(&spec, &config))?;
    if compiled.circuit.qubits != 10 {
        return Err(format!("expected 10 qubits, compiled {}", compiled.circuit.qubits));
    }
    let input = FockState::new(vec![2, 0, 0, 0, 0]);
    let v = lib(run(&compiled.circuit, &input))?;
    let dist = probabilities(&v, 5, &config, 2);
    let oracle = lib(exact_distribution(&spec, &input))?;
    if dist.entries.len() != 15 || oracle.entries.len() != 15 {
        return Err(format!(
            "expected 15 outcomes, circuit lists {}, oracle {}",
            dist.entries.len(),
            oracle.entries.len()
        ));
    }
    let mut worst = 0.0f64;
    let mut total = 0.0f64;
    for (state, &p) in &dist.entries {
        total += p;
        worst = worst.max((p - oracle.probability(state)).abs());
    }
    if worst > TOL {
        return Err(format!("probability error {worst:.3e} over {TOL:.0e}"));
    }
    if (total - 1.0).abs() > 1e-10 {
        return Err(format!("probability sum {total} departs from 1 by over 1e-10"));
    }
    Ok(format!(
        "10 qubits, 15 outcomes, max error {worst:.3e}, sum 1{:+.1e}",
        total - 1.0
    ))
}

/// Criterion 5: circuit depths land in the expected order-of-magnitude bands
/// (depths are synthesis-dependent, so only bands are pinned).
fn depth_bands() -> Result<String, String> {
    let two = lib(compile(
        &haar_spec(2, 1)?,
        &TruncationConfig::new(3, ExpansionMode::PadToPowerOfTwo),
    ))?;
    let five = lib(compile(
        &haar_spec(5, 7)?,
        &TruncationConfig::new(2, ExpansionMode::PadToPowerOfTwo),
    ))?;
    let d2 = two.stats.depth;
    let d5 = five.stats.depth;
    if !(50..=1000).contains(&d2) {
        return Err(format!("two-mode three-photon depth {d2} outside [50, 1000]"));
    }
    if !(500..=10000).contains(&d5) {
        return Err(format!("five-mode two-photon depth {d5} outside [500, 10000]"));
    }
    Ok(format!(
        "two-mode n=3 depth {d2} in [50, 1000]; five-mode n=2 depth {d5} in [500, 10000]"
    ))
}

/// Criterion 6: two photons meeting a balanced beamsplitter never exit in
/// separate modes; the bunched outcomes split the mass evenly.
fn two_photon_interference() -> Result<String, String> {
    let r = 1.0 / 2.0f64.sqrt();
    let u = mat_from_rows(
        2,
        2,
        &[
            Complex64::new(r, 0.0),
            Complex64::new(r, 0.0),
            Complex64::new(r, 0.0),
            Complex64::new(-r, 0.0),
        ],
    );
    let spec = lib(InterferometerSpec::new(u))?;
    let config = TruncationConfig::new(2, ExpansionMode::PadToPowerOfTwo);
    let compiled = lib(compile(&spec, &config))?;
    let input = FockState::new(vec![1, 1]);
    let v = lib(run(&compiled.circuit, &input))?;
    let dist = probabilities(&v, 2, &config, 2);
    let p11 = dist.probability(&input);
    let p20 = dist.probability(&FockState::new(vec![2, 0]));
    let p02 = dist.probability(&FockState::new(vec![0, 2]));
    if p11 > 1e-10 {
        return Err(format!("coincidence probability {p11:.3e} over 1e-10"));
    }
    if (p20 - 0.5).abs() > 1e-9 || (p02 - 0.5).abs() > 1e-9 {
        return Err(format!("bunched outcomes {p20} / {p02} depart from 0.5 by over 1e-9"));
    }
    let oracle = lib(exact_distribution(&spec, &input))?;
    let mut worst = 0.0f64;
    for (state, &want) in &oracle.entries {
        worst = worst.max((dist.probability(state) - want).abs());
    }
    if worst > 1e-9 {
        return Err(format!("oracle disagreement {worst:.3e} over 1e-9"));
    }
    Ok(format!("coincidence {p11:.1e}, bunching {p20:.9} / {p02:.9}"))
}

/// Criterion 7: property suites for the pipeline invariants: photon-number
/// conservation, padded-level fixed points, synthesis reconstruction,
/// permanent algorithm agreement, and the register-width formula.
fn invariant_suites() -> Result<String, String> {
    // Photon conservation: across the m ≤ 5, n ≤ 3 grid no probability mass
    // may leak out of the input photon sector.
    let mut leakage = 0.0f64;
    let mut width_33 = 0;
    let mut width_52 = 0;
    for m in 2..=5usize {
        for n in 1..=3usize {
            let spec = haar_spec(m, (10 * m + n) as u64)?;
            let config = TruncationConfig::new(n, ExpansionMode::PadToPowerOfTwo);
            let compiled = lib(compile(&spec, &config))?;
            if (m, n) == (3, 3) {
                width_33 = compiled.circuit.qubits;
            }
            if (m, n) == (5, 2) {
                width_52 = compiled.circuit.qubits;
            }
            for input in enumerate_fock_states(m, n).into_iter().take(3) {
                let v = lib(run(&compiled.circuit, &input))?;
                leakage = leakage.max(probabilities(&v, m, &config, n).residual);
            }
        }
    }
    if leakage > 1e-10 {
        return Err(format!("photon-sector leakage {leakage:.3e} over 1e-10"));
    }

    // Padding fixed points: register levels above the photon cutoff must ride
    // through the lifted unitary untouched.
    let mut pad_err = 0.0f64;
    for (n, seeds) in [(2usize, 3u64), (4, 1)] {
        let config = TruncationConfig::new(n, ExpansionMode::PadToPowerOfTwo);
        let d = config.d();
        for seed in 0..seeds {
            let t = lib(haar_random_unitary(2, 300 + seed))?;
            let full = lib(truncated_two_mode_unitary(&t, &config))?;
            for row in 0..d * d {
                let (s0, s1) = (row % d, row / d);
                if s0 <= n && s1 <= n {
                    continue;
                }
                for col in 0..d * d {
                    let want = if col == row { Complex64::ONE } else { Complex64::ZERO };
                    pad_err = pad_err.max((full[(row, col)] - want).norm());
                }
            }
        }
    }
    if pad_err > 1e-12 {
        return Err(format!("padded levels disturbed by {pad_err:.3e}"));
    }

    // Synthesis reconstruction at every block width the compiler emits.
    let mut synth_err = 0.0f64;
    for k in 1..=4usize {
        let u = lib(haar_random_unitary(1 << k, 400 + k as u64))?;
        let result = lib(synthesize(&u))?;
        synth_err = synth_err.max(replay_error(&result, &u)?);
    }
    if synth_err > 1e-9 {
        return Err(format!("synthesis reconstruction error {synth_err:.3e} over 1e-9"));
    }

    // Permanent: the Gray-code evaluator must agree with cofactor expansion.
    let mut perm_err = 0.0f64;
    let mut rng = ChaCha20Rng::seed_from_u64(77);
    for n in 1..=6usize {
        for _ in 0..3 {
            let entries: Vec<Complex64> = (0..n * n)
                .map(|_| {
                    Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)
                })
                .collect();
            let a = mat_from_rows(n, n, &entries);
            let fast = lib(permanent(&a))?;
            let slow = lib(naive_permanent(&a))?;
            perm_err = perm_err.max((fast - slow).norm() / slow.norm().max(1.0));
        }
    }
    if perm_err > 1e-10 {
        return Err(format!("permanent mismatch {perm_err:.3e} over 1e-10"));
    }

    // Register width: m modes need m·max(1, ⌈log₂(n+1)⌉) qubits.
    if TruncationConfig::new(3, ExpansionMode::PadToPowerOfTwo).w() * 3 != 6 || width_33 != 6 {
        return Err(format!("3-mode 3-photon register is {width_33} qubits, not 6"));
    }
    if TruncationConfig::new(2, ExpansionMode::PadToPowerOfTwo).w() * 5 != 10 || width_52 != 10 {
        return Err(format!("5-mode 2-photon register is {width_52} qubits, not 10"));
    }

    Ok(format!(
        "leakage {leakage:.1e}; padding {pad_err:.1e}; synthesis {synth_err:.1e}; \
         permanents {perm_err:.1e}; register widths 6 and 10"
    ))
}

/// Criterion 8: the scaling sweep over n in {1,2,4,8} finishes inside its
/// budget, writes the documented CSV schema, and shows depth growing with
/// the photon budget.
fn scaling_sweep() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let csv_path = dir.path().join("scaling.csv");
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_photonc"))
        .args([
            "scaling",
            "--modes",
            "2",
            "--photons-list",
            "1,2,4,8",
            "--samples",
            "3",
            "--seed",
            "1",
            "--csv",
            csv_path.to_str().unwrap(),
        ])
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.code() != Some(0) {
        return Err(format!(
            "scaling exited with {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }

    let csv = std::fs::read_to_string(&csv_path).map_err(|e| e.to_string())?;
    let lines: Vec<&str> = csv.lines().collect();
    let header = "n,sample,qubits,depth,cnot_count,matrix_exponentiation_ms,circuit_synthesis_ms";
    if lines.first() != Some(&header) {
        return Err(format!("unexpected CSV header {:?}", lines.first()));
    }
    if lines.len() != 13 {
        return Err(format!("expected 12 data rows, found {}", lines.len() - 1));
    }
    let budgets = [1usize, 2, 4, 8];
    let mut mean_depths = Vec::new();
    for (b, &n) in budgets.iter().enumerate() {
        let mut total = 0usize;
        for s in 0..3 {
            let fields: Vec<&str> = lines[1 + 3 * b + s].split(',').collect();
            if fields.len() != 7 {
                return Err(format!("row {} has {} fields", 1 + 3 * b + s, fields.len()));
            }
            if fields[0].parse::<usize>() != Ok(n) || fields[1].parse::<usize>() != Ok(s) {
                return Err(format!("row {} keys out of order", 1 + 3 * b + s));
            }
            total += fields[3].parse::<usize>().map_err(|e| e.to_string())?;
        }
        mean_depths.push(total as f64 / 3.0);
    }
    if !mean_depths.windows(2).all(|w| w[0] < w[1]) {
        return Err(format!("mean depths {mean_depths:?} are not strictly increasing"));
    }
    Ok(format!(
        "12 rows, mean depths {} strictly increasing over n = 1,2,4,8",
        mean_depths.iter().map(|d| format!("{d:.0}")).collect::<Vec<_>>().join(" < ")
    ))
}

/// Criterion 9: 10,000 seeded shots from the 3-mode 3-photon circuit land
/// within total-variation distance 0.03 of the exact distribution.
fn sampling_statistics() -> Result<String, String> {
    let spec = haar_spec(3, 42)?;
    let config = TruncationConfig::new(3, ExpansionMode::PadToPowerOfTwo);
    let compiled = lib(compile(&spec, &config))?;
    let input = FockState::new(vec![2, 1, 0]);
    let v = lib(run(&compiled.circuit, &input))?;
    let dist = probabilities(&v, 3, &config, 3);
    let oracle = lib(exact_distribution(&spec, &input))?;

    let shots = 10_000u64;
    let counts = sample(&dist, shots, 7);
    let mut tv = 0.0f64;
    for (state, &p) in &oracle.entries {
        let freq = counts.get(state).copied().unwrap_or(0) as f64 / shots as f64;
        tv += (freq - p).abs();
    }
    tv /= 2.0;
    if tv > 0.03 {
        return Err(format!("total variation {tv:.4} over 0.03"));
    }
    Ok(format!("{shots} shots, total variation {tv:.4} within 0.03"))
}
