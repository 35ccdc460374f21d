//! Command-line front end: compile, simulate, verify, and scaling study.
//!
//! File formats live here too: the unitary JSON document, the compile
//! report, and the simulation report. Exit codes are fixed for scripting:
//! 0 success, 1 I/O, 2 validation (including failed verification),
//! 3 resource guard.

use crate::circuit::{compile, import_qasm, Circuit, Compiled};
use crate::fock::{ExpansionMode, FockState, TruncationConfig};
use crate::linalg::{
    check_unitary, haar_random_unitary, mat_from_rows, nearest_unitary, ComplexMatrix,
};
use crate::oracle::exact_distribution;
use crate::sim::{probabilities, run, sample, OutcomeDistribution};
use crate::{Error, InterferometerSpec, Result};
use clap::{ArgGroup, Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Per-block synthesis is exponential in the block width; refuse blocks
/// wider than this many qubits (2w per beamsplitter).
pub const MAX_BLOCK_QUBITS: usize = 12;

#[derive(Parser, Debug)]
#[command(
    name = "photonc",
    about = "Compile linear-optical interferometers into CNOT/U3 circuits",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compile a mode unitary into a qubit circuit.
    Compile(CompileArgs),
    /// Simulate a compiled circuit on a Fock input.
    Simulate(SimulateArgs),
    /// Compile, simulate, and compare against the permanent oracle.
    Verify(VerifyArgs),
    /// Sweep photon budgets and record circuit sizes and compile times.
    Scaling(ScalingArgs),
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("source").required(true).args(["unitary", "random_modes"])))]
pub struct CompileArgs {
    /// Unitary JSON file: { "m": int, "re": m×m, "im": m×m }.
    #[arg(long)]
    pub unitary: Option<PathBuf>,
    /// Compile a Haar-random unitary on this many modes instead.
    #[arg(long, value_name = "M")]
    pub random_modes: Option<usize>,
    /// Seed for --random-modes.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Photon budget n.
    #[arg(long, value_name = "N")]
    pub photons: usize,
    /// Zero-pad each register to its power-of-two dimension (default).
    #[arg(long, conflicts_with = "expand")]
    pub pad: bool,
    /// Raise the truncation level to fill the power-of-two dimension.
    #[arg(long)]
    pub expand: bool,
    /// Reject unitary files that miss the pipeline tolerance instead of
    /// re-orthonormalizing them.
    #[arg(long)]
    pub strict: bool,
    /// Write the circuit here as OpenQASM 2.0.
    #[arg(long, value_name = "QASM")]
    pub out: Option<PathBuf>,
    /// Write the compile report here; stdout when omitted.
    #[arg(long, value_name = "JSON")]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Circuit file produced by `compile`.
    #[arg(long, value_name = "QASM")]
    pub circuit: PathBuf,
    /// Input occupations, one per mode: "s1,s2,...,sm".
    #[arg(long)]
    pub input: String,
    /// Also draw this many measurement shots.
    #[arg(long)]
    pub shots: Option<u64>,
    /// Sampling seed.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Write the simulation report here; stdout when omitted.
    #[arg(long, value_name = "JSON")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("source").required(true).args(["unitary", "random_modes"])))]
pub struct VerifyArgs {
    /// Unitary JSON file: { "m": int, "re": m×m, "im": m×m }.
    #[arg(long)]
    pub unitary: Option<PathBuf>,
    /// Verify a Haar-random unitary on this many modes instead.
    #[arg(long, value_name = "M")]
    pub random_modes: Option<usize>,
    /// Seed for --random-modes and sampling.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Photon budget n.
    #[arg(long, value_name = "N")]
    pub photons: usize,
    /// Input occupations, one per mode: "s1,s2,...,sm".
    #[arg(long)]
    pub input: String,
    /// Also report the sampled-frequency total-variation distance.
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long, conflicts_with = "expand")]
    pub pad: bool,
    #[arg(long)]
    pub expand: bool,
    #[arg(long)]
    pub strict: bool,
}

#[derive(Args, Debug)]
pub struct ScalingArgs {
    /// Interferometer size for the sweep.
    #[arg(long, default_value_t = 2)]
    pub modes: usize,
    /// Photon budgets to sweep: "1,2,3,4,6,8".
    #[arg(long, value_name = "LIST")]
    pub photons_list: String,
    /// Haar samples per photon budget.
    #[arg(long, default_value_t = 3)]
    pub samples: usize,
    /// Base seed; sample r uses seed + r.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output CSV path.
    #[arg(long, value_name = "FILE")]
    pub csv: PathBuf,
}

/// JSON wire format for a mode unitary.
#[derive(Serialize, Deserialize, Debug)]
pub struct UnitaryFile {
    pub m: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

/// Tolerance for matrices arriving from JSON; serialization rounding is
/// projected away unless --strict.
pub const INGEST_TOL: f64 = 1e-8;

impl UnitaryFile {
    pub fn from_matrix(u: &ComplexMatrix) -> Self {
        let m = u.nrows();
        let re = (0..m)
            .map(|r| (0..m).map(|c| u[(r, c)].re).collect())
            .collect();
        let im = (0..m)
            .map(|r| (0..m).map(|c| u[(r, c)].im).collect())
            .collect();
        UnitaryFile { m, re, im }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.m == 0 {
            return Err(Error::Validation("unitary file has m = 0".to_string()));
        }
        let check = |name: &str, rows: &Vec<Vec<f64>>| -> Result<()> {
            if rows.len() != self.m || rows.iter().any(|r| r.len() != self.m) {
                return Err(Error::Validation(format!(
                    "'{name}' is not an {0}x{0} array",
                    self.m
                )));
            }
            Ok(())
        };
        check("re", &self.re)?;
        check("im", &self.im)?;
        let entries: Vec<Complex64> = self
            .re
            .iter()
            .zip(&self.im)
            .flat_map(|(rr, ri)| {
                rr.iter()
                    .zip(ri)
                    .map(|(&re, &im)| Complex64::new(re, im))
            })
            .collect();
        Ok(mat_from_rows(self.m, self.m, &entries))
    }
}

/// Read and validate a unitary file. Deviations up to [`INGEST_TOL`] are
/// projected back onto the unitary group unless `strict`.
pub fn read_unitary(path: &Path, strict: bool) -> Result<InterferometerSpec> {
    let text = std::fs::read_to_string(path)?;
    let file: UnitaryFile = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let matrix = file.to_matrix()?;
    if strict {
        return InterferometerSpec::new(matrix);
    }
    let report = check_unitary(&matrix, INGEST_TOL)?;
    if !report.passed {
        return Err(Error::Validation(format!(
            "matrix in {} deviates from unitarity by {:.3e} (ingest tolerance {INGEST_TOL:.0e})",
            path.display(),
            report.max_deviation
        )));
    }
    InterferometerSpec::new(nearest_unitary(&matrix)?)
}

/// Parse "s1,s2,...,sm" into occupations.
pub fn parse_occupations(text: &str) -> Result<FockState> {
    let occupations: Result<Vec<usize>> = text
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("invalid occupation '{}'", tok.trim())))
        })
        .collect();
    let occupations = occupations?;
    if occupations.is_empty() {
        return Err(Error::Parse("empty occupation list".to_string()));
    }
    Ok(FockState::new(occupations))
}

fn expansion_mode(expand: bool) -> ExpansionMode {
    if expand {
        ExpansionMode::ExpandTruncation
    } else {
        ExpansionMode::PadToPowerOfTwo
    }
}

/// Refuse configurations whose per-beamsplitter blocks are too wide to
/// synthesize in reasonable time.
pub fn ensure_synthesizable(config: &TruncationConfig) -> Result<()> {
    let block = 2 * config.w();
    if block > MAX_BLOCK_QUBITS {
        return Err(Error::Resource(format!(
            "photon budget {} needs {block}-qubit blocks, over the {MAX_BLOCK_QUBITS}-qubit \
             synthesis guard",
            config.n
        )));
    }
    Ok(())
}

#[derive(Serialize, Debug)]
struct TimingReport {
    matrix_exponentiation_ms: f64,
    circuit_synthesis_ms: f64,
    total_ms: f64,
}

#[derive(Serialize, Debug)]
struct ConfigEcho {
    modes: usize,
    n: usize,
    mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

#[derive(Serialize, Debug)]
struct ElementReport {
    index: usize,
    mode_lo: usize,
    depth: usize,
    gate_count: usize,
    cnot_count: usize,
}

#[derive(Serialize, Debug)]
struct CompileReport {
    qubit_count: usize,
    depth: usize,
    gate_count: usize,
    cnot_count: usize,
    max_reconstruction_error: f64,
    per_element: Vec<ElementReport>,
    timing: TimingReport,
    config: ConfigEcho,
}

fn mode_label(mode: ExpansionMode) -> &'static str {
    match mode {
        ExpansionMode::PadToPowerOfTwo => "pad",
        ExpansionMode::ExpandTruncation => "expand",
    }
}

fn build_report(compiled: &Compiled, config: &TruncationConfig, seed: Option<u64>) -> CompileReport {
    let circuit = &compiled.circuit;
    let per_element = circuit
        .element_ranges
        .iter()
        .enumerate()
        .map(|(index, range)| {
            let gates = &circuit.gates[range.clone()];
            ElementReport {
                index,
                mode_lo: compiled.decomposition.elements[index].mode_lo,
                depth: crate::synth::wavefront_depth(gates),
                gate_count: gates.len(),
                cnot_count: crate::synth::count_cnots(gates),
            }
        })
        .collect();
    CompileReport {
        qubit_count: compiled.stats.qubit_count,
        depth: compiled.stats.depth,
        gate_count: compiled.stats.gate_count,
        cnot_count: compiled.stats.cnot_count,
        max_reconstruction_error: compiled.max_reconstruction_error,
        per_element,
        timing: TimingReport {
            matrix_exponentiation_ms: compiled.timing.matrix_exponentiation_ms,
            circuit_synthesis_ms: compiled.timing.circuit_synthesis_ms,
            total_ms: compiled.timing.total_ms,
        },
        config: ConfigEcho {
            modes: circuit.m,
            n: config.n,
            mode: mode_label(config.mode),
            seed,
        },
    }
}

fn write_or_print(path: &Option<PathBuf>, contents: &str) -> Result<()> {
    match path {
        Some(p) => {
            std::fs::write(p, contents)?;
            Ok(())
        }
        None => {
            println!("{contents}");
            Ok(())
        }
    }
}

fn load_spec(
    unitary: &Option<PathBuf>,
    random_modes: Option<usize>,
    seed: u64,
    strict: bool,
) -> Result<(InterferometerSpec, Option<u64>)> {
    match (unitary, random_modes) {
        (Some(path), None) => Ok((read_unitary(path, strict)?, None)),
        (None, Some(m)) => {
            let u = haar_random_unitary(m, seed)?;
            Ok((InterferometerSpec::new(u)?, Some(seed)))
        }
        _ => Err(Error::Validation(
            "provide exactly one of --unitary and --random-modes".to_string(),
        )),
    }
}

pub fn cmd_compile(args: &CompileArgs) -> Result<i32> {
    let (spec, seed) = load_spec(&args.unitary, args.random_modes, args.seed, args.strict)?;
    let config = TruncationConfig::new(args.photons, expansion_mode(args.expand));
    ensure_synthesizable(&config)?;
    let compiled = compile(&spec, &config)?;
    if let Some(out) = &args.out {
        std::fs::write(out, crate::circuit::export_qasm(&compiled.circuit))?;
    }
    let report = build_report(&compiled, &config, seed);
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::Validation(format!("report serialization: {e}")))?;
    write_or_print(&args.report, &json)?;
    Ok(0)
}

#[derive(Serialize, Debug)]
struct OutcomeReport {
    state: Vec<usize>,
    probability: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    count: Option<u64>,
}

#[derive(Serialize, Debug)]
struct SimulationReport {
    input: Vec<usize>,
    qubit_count: usize,
    photons: usize,
    residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    shots: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    outcomes: Vec<OutcomeReport>,
}

fn simulation_report(
    circuit: &Circuit,
    input: &FockState,
    shots: Option<u64>,
    seed: u64,
) -> Result<(SimulationReport, OutcomeDistribution)> {
    let config = TruncationConfig::new(circuit.n, circuit.mode);
    let v = run(circuit, input)?;
    let dist = probabilities(&v, circuit.m, &config, input.total_photons());
    let counts = shots.map(|k| sample(&dist, k, seed));
    let outcomes = dist
        .entries
        .iter()
        .map(|(state, &probability)| OutcomeReport {
            state: state.occupations.clone(),
            probability,
            count: counts.as_ref().map(|c| c[state]),
        })
        .collect();
    let report = SimulationReport {
        input: input.occupations.clone(),
        qubit_count: circuit.qubits,
        photons: input.total_photons(),
        residual: dist.residual,
        shots,
        seed: shots.map(|_| seed),
        outcomes,
    };
    Ok((report, dist))
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<i32> {
    let text = std::fs::read_to_string(&args.circuit)?;
    let circuit = import_qasm(&text)?;
    let input = parse_occupations(&args.input)?;
    let (report, _) = simulation_report(&circuit, &input, args.shots, args.seed)?;
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::Validation(format!("report serialization: {e}")))?;
    write_or_print(&args.out, &json)?;
    Ok(0)
}

/// 0.5·Σ|p − q| over the union of outcomes, plus half of any residual mass.
fn total_variation(a: &OutcomeDistribution, b: &OutcomeDistribution) -> f64 {
    let mut tv = 0.0;
    for (state, &p) in &a.entries {
        tv += (p - b.probability(state)).abs();
    }
    for (state, &q) in &b.entries {
        if !a.entries.contains_key(state) {
            tv += q.abs();
        }
    }
    (tv + (a.residual - b.residual).abs()) / 2.0
}

pub const VERIFY_TOL: f64 = 1e-9;

pub fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    let (spec, seed) = load_spec(&args.unitary, args.random_modes, args.seed, args.strict)?;
    let input = parse_occupations(&args.input)?;
    if input.total_photons() > args.photons {
        return Err(Error::Validation(format!(
            "input carries {} photons, over the budget n = {}",
            input.total_photons(),
            args.photons
        )));
    }
    let config = TruncationConfig::new(args.photons, expansion_mode(args.expand));
    ensure_synthesizable(&config)?;
    let compiled = compile(&spec, &config)?;
    let v = run(&compiled.circuit, &input)?;
    let circuit_dist = probabilities(&v, compiled.circuit.m, &config, input.total_photons());
    let oracle_dist = exact_distribution(&spec, &input)?;

    let mut max_error = circuit_dist.residual;
    for (state, &p) in &oracle_dist.entries {
        max_error = max_error.max((p - circuit_dist.probability(state)).abs());
    }
    let tv = total_variation(&circuit_dist, &oracle_dist);
    println!("outcomes: {}", oracle_dist.entries.len());
    println!("max absolute per-outcome error: {max_error:.3e}");
    println!("total variation distance: {tv:.3e}");
    if let Some(shots) = args.shots {
        let counts = sample(&circuit_dist, shots, seed.unwrap_or(args.seed));
        let mut sampled_tv = 0.0;
        for (state, &p) in &oracle_dist.entries {
            let freq = counts.get(state).copied().unwrap_or(0) as f64 / shots as f64;
            sampled_tv += (freq - p).abs();
        }
        println!("sampled total variation ({shots} shots): {:.3e}", sampled_tv / 2.0);
    }
    if max_error <= VERIFY_TOL {
        println!("verification passed (tolerance {VERIFY_TOL:.0e})");
        Ok(0)
    } else {
        println!("verification FAILED (tolerance {VERIFY_TOL:.0e})");
        Ok(2)
    }
}

pub fn cmd_scaling(args: &ScalingArgs) -> Result<i32> {
    if args.modes < 2 {
        return Err(Error::Validation("scaling needs at least 2 modes".to_string()));
    }
    if args.samples == 0 {
        return Err(Error::Validation("scaling needs at least 1 sample".to_string()));
    }
    let photon_budgets: Result<Vec<usize>> = args
        .photons_list
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("invalid photon count '{}'", tok.trim())))
        })
        .collect();
    let photon_budgets = photon_budgets?;
    if photon_budgets.is_empty() {
        return Err(Error::Validation("empty photon list".to_string()));
    }
    for &n in &photon_budgets {
        ensure_synthesizable(&TruncationConfig::new(n, ExpansionMode::PadToPowerOfTwo))?;
    }

    // One interferometer per sample index, shared across photon budgets, so
    // depth growth reflects the budget rather than the random draw.
    let specs: Result<Vec<InterferometerSpec>> = (0..args.samples)
        .map(|r| InterferometerSpec::new(haar_random_unitary(args.modes, args.seed + r as u64)?))
        .collect();
    let specs = specs?;

    let mut csv = String::from(
        "n,sample,qubits,depth,cnot_count,matrix_exponentiation_ms,circuit_synthesis_ms\n",
    );
    for &n in &photon_budgets {
        let config = TruncationConfig::new(n, ExpansionMode::PadToPowerOfTwo);
        for (r, spec) in specs.iter().enumerate() {
            let compiled = compile(spec, &config)?;
            csv.push_str(&format!(
                "{},{},{},{},{},{:.3},{:.3}\n",
                n,
                r,
                compiled.stats.qubit_count,
                compiled.stats.depth,
                compiled.stats.cnot_count,
                compiled.timing.matrix_exponentiation_ms,
                compiled.timing.circuit_synthesis_ms
            ));
        }
    }
    std::fs::write(&args.csv, csv)?;
    Ok(0)
}

/// Exit code for an error bubbling out of a command.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) => 1,
        Error::Parse(_) | Error::Validation(_) | Error::Dimension(_) => 2,
        Error::Resource(_) => 3,
    }
}

pub fn dispatch(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Compile(args) => cmd_compile(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Scaling(args) => cmd_scaling(args),
    }
}

/// Binary entry point; parses argv, runs, maps errors to exit codes.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}
