//! Circuit representation over the full m·w-qubit register, assembly of
//! per-beamsplitter blocks, statistics, and a small OpenQASM 2.0 subset
//! (u3 + cx) for export and re-import.

use crate::clements::ClementsDecomposition;
use crate::fock::{ExpansionMode, TruncationConfig};
use crate::linalg::ComplexMatrix;
use crate::synth::{
    count_cnots, synthesize, synthesize_diagonal, wavefront_depth, Gate, SynthesisResult,
};
use crate::{Error, InterferometerSpec, Result};
use std::fmt::Write as _;
use std::ops::Range;
use std::time::Instant;

/// A compiled circuit on m registers of w qubits each. Gates use absolute
/// qubit indices; qubit j belongs to mode ⌊j/w⌋, bit j mod w, bit 0 least
/// significant within the register.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub qubits: usize,
    pub gates: Vec<Gate>,
    pub m: usize,
    pub n: usize,
    pub w: usize,
    pub mode: ExpansionMode,
    /// Gate ranges contributed by each beamsplitter element, in application
    /// order. Together with `diagonal_range` they partition `gates`.
    /// Imported circuits carry no boundary information (empty).
    pub element_ranges: Vec<Range<usize>>,
    /// Gate range of the residual output-phase diagonal.
    pub diagonal_range: Range<usize>,
}

/// Aggregate size and shape measures of a circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitStats {
    pub depth: usize,
    pub gate_count: usize,
    pub cnot_count: usize,
    pub qubit_count: usize,
    pub per_element_depths: Vec<usize>,
}

/// Synthesize the residual per-mode output phases: mode i picks up
/// e^{iα_i·k} on occupation level k, which is a diagonal on register i alone.
/// The returned result spans the full m·w-qubit register.
pub fn mode_phase_diagonal(phases: &[f64], config: &TruncationConfig) -> Result<SynthesisResult> {
    let w = config.w();
    let d = config.d();
    let mut gates = Vec::new();
    let mut global_phase = 0.0;
    let mut reconstruction_error = 0.0f64;
    for (mode, &alpha) in phases.iter().enumerate() {
        let levels: Vec<f64> = (0..d).map(|k| alpha * k as f64).collect();
        let part = synthesize_diagonal(&levels)?;
        gates.extend(part.gates.iter().map(|g| g.shifted(mode * w)));
        global_phase += part.global_phase;
        reconstruction_error = reconstruction_error.max(part.reconstruction_error);
    }
    Ok(SynthesisResult {
        cnot_count: count_cnots(&gates),
        depth: wavefront_depth(&gates),
        qubits: phases.len() * w,
        reconstruction_error,
        global_phase: crate::synth::wrap_to_pi(global_phase),
        gates,
    })
}

/// Assemble per-element synthesized blocks and the output-phase diagonal
/// into one circuit, in decomposition application order.
///
/// Blocks are in local coordinates (2w qubits starting at 0) and are shifted
/// onto absolute qubits [i·w, (i+2)·w) for an element acting on modes
/// (i, i+1); the diagonal is already full-width and is appended last, on the
/// output side, matching the factorization U = D·T_K···T_1.
pub fn assemble(
    d: &ClementsDecomposition,
    blocks: &[SynthesisResult],
    diag: &SynthesisResult,
    config: &TruncationConfig,
) -> Result<Circuit> {
    let w = config.w();
    let qubits = d.m * w;
    if blocks.len() != d.elements.len() {
        return Err(Error::Validation(format!(
            "assembly needs one block per element: {} blocks for {} elements",
            blocks.len(),
            d.elements.len()
        )));
    }
    for (i, block) in blocks.iter().enumerate() {
        if block.qubits != 2 * w {
            return Err(Error::Dimension(format!(
                "block {} spans {} qubits, expected {} for two registers of width {}",
                i,
                block.qubits,
                2 * w,
                w
            )));
        }
    }
    if diag.qubits != qubits {
        return Err(Error::Dimension(format!(
            "diagonal block spans {} qubits, expected the full register of {}",
            diag.qubits, qubits
        )));
    }

    let total: usize = blocks.iter().map(|b| b.gates.len()).sum::<usize>() + diag.gates.len();
    let mut gates = Vec::with_capacity(total);
    let mut element_ranges = Vec::with_capacity(blocks.len());
    for (element, block) in d.elements.iter().zip(blocks) {
        let offset = element.mode_lo * w;
        let start = gates.len();
        gates.extend(block.gates.iter().map(|g| g.shifted(offset)));
        element_ranges.push(start..gates.len());
    }
    let start = gates.len();
    gates.extend(diag.gates.iter().cloned());
    let diagonal_range = start..gates.len();

    Ok(Circuit {
        qubits,
        gates,
        m: d.m,
        n: config.n,
        w,
        mode: config.mode,
        element_ranges,
        diagonal_range,
    })
}

/// Depth and gate counts; depth is wavefront-scheduled (a gate starts as soon
/// as all its wires are free).
pub fn stats(c: &Circuit) -> CircuitStats {
    CircuitStats {
        depth: wavefront_depth(&c.gates),
        gate_count: c.gates.len(),
        cnot_count: count_cnots(&c.gates),
        qubit_count: c.qubits,
        per_element_depths: c
            .element_ranges
            .iter()
            .map(|r| wavefront_depth(&c.gates[r.clone()]))
            .collect(),
    }
}

fn mode_tag(mode: ExpansionMode) -> &'static str {
    match mode {
        ExpansionMode::PadToPowerOfTwo => "pad",
        ExpansionMode::ExpandTruncation => "expand",
    }
}

fn mode_from_tag(tag: &str) -> Result<ExpansionMode> {
    match tag {
        "pad" => Ok(ExpansionMode::PadToPowerOfTwo),
        "expand" => Ok(ExpansionMode::ExpandTruncation),
        other => Err(Error::Parse(format!("unknown truncation mode '{other}'"))),
    }
}

/// Emit the circuit as OpenQASM 2.0 restricted to `u3` and `cx`. Floating
/// point parameters carry 17 significant digits, enough to reproduce the f64
/// values exactly on re-parse. A comment line records the photonic register
/// layout so the file is self-describing for the importer.
pub fn export_qasm(c: &Circuit) -> String {
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\n");
    out.push_str("include \"qelib1.inc\";\n");
    let _ = writeln!(
        out,
        "// photonic: m={} n={} w={} mode={}",
        c.m,
        c.n,
        c.w,
        mode_tag(c.mode)
    );
    let _ = writeln!(out, "qreg q[{}];", c.qubits);
    for gate in &c.gates {
        match gate {
            Gate::Cnot { control, target } => {
                let _ = writeln!(out, "cx q[{control}],q[{target}];");
            }
            Gate::U3 { qubit, theta, phi, lambda } => {
                let _ = writeln!(out, "u3({theta:.16e},{phi:.16e},{lambda:.16e}) q[{qubit}];");
            }
        }
    }
    out
}

fn parse_qubit_ref(token: &str, size: usize) -> Result<usize> {
    let token = token.trim();
    let inner = token
        .strip_prefix("q[")
        .and_then(|rest| rest.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("expected qubit reference q[i], got '{token}'")))?;
    let idx: usize = inner
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("invalid qubit index '{inner}'")))?;
    if idx >= size {
        return Err(Error::Parse(format!(
            "qubit index {idx} out of range for register of size {size}"
        )));
    }
    Ok(idx)
}

fn parse_f64(token: &str) -> Result<f64> {
    token
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("invalid parameter '{}'", token.trim())))
}

/// Parse a circuit previously written by [`export_qasm`]. The reader covers
/// exactly the emitted subset (one `qreg`, `u3`, `cx`) and requires the
/// photonic metadata comment; foreign QASM is out of scope.
pub fn import_qasm(text: &str) -> Result<Circuit> {
    let mut meta: Option<(usize, usize, usize, ExpansionMode)> = None;
    for line in text.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("// photonic:") {
            let mut m = None;
            let mut n = None;
            let mut w = None;
            let mut mode = None;
            for field in rest.split_whitespace() {
                let (key, value) = field
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("bad metadata field '{field}'")))?;
                match key {
                    "m" => m = Some(value.parse().map_err(|_| {
                        Error::Parse(format!("bad metadata value '{value}'"))
                    })?),
                    "n" => n = Some(value.parse().map_err(|_| {
                        Error::Parse(format!("bad metadata value '{value}'"))
                    })?),
                    "w" => w = Some(value.parse().map_err(|_| {
                        Error::Parse(format!("bad metadata value '{value}'"))
                    })?),
                    "mode" => mode = Some(mode_from_tag(value)?),
                    other => {
                        return Err(Error::Parse(format!("unknown metadata key '{other}'")))
                    }
                }
            }
            match (m, n, w, mode) {
                (Some(m), Some(n), Some(w), Some(mode)) => meta = Some((m, n, w, mode)),
                _ => return Err(Error::Parse("incomplete photonic metadata".to_string())),
            }
        }
    }
    let (m, n, w, mode) = meta.ok_or_else(|| {
        Error::Parse("missing '// photonic:' metadata comment".to_string())
    })?;

    // Strip comments, then read ';'-terminated statements.
    let body: String = text
        .lines()
        .map(|l| match l.find("//") {
            Some(pos) => &l[..pos],
            None => l,
        })
        .collect::<Vec<_>>()
        .join("\n");

    let mut size: Option<usize> = None;
    let mut gates = Vec::new();
    let mut saw_version = false;
    for stmt in body.split(';') {
        let stmt = stmt.trim();
        if stmt.is_empty() {
            continue;
        }
        if let Some(rest) = stmt.strip_prefix("OPENQASM") {
            if rest.trim() != "2.0" {
                return Err(Error::Parse(format!(
                    "unsupported OPENQASM version '{}'",
                    rest.trim()
                )));
            }
            saw_version = true;
        } else if stmt.starts_with("include") {
            continue;
        } else if let Some(rest) = stmt.strip_prefix("qreg") {
            if size.is_some() {
                return Err(Error::Parse("multiple qreg declarations".to_string()));
            }
            let rest = rest.trim();
            let open = rest
                .find('[')
                .ok_or_else(|| Error::Parse(format!("bad qreg declaration '{rest}'")))?;
            let close = rest
                .find(']')
                .ok_or_else(|| Error::Parse(format!("bad qreg declaration '{rest}'")))?;
            let count: usize = rest[open + 1..close]
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad register size in '{rest}'")))?;
            size = Some(count);
        } else if let Some(rest) = stmt.strip_prefix("cx") {
            let size = size.ok_or_else(|| Error::Parse("gate before qreg".to_string()))?;
            let mut parts = rest.trim().split(',');
            let control = parse_qubit_ref(
                parts.next().ok_or_else(|| Error::Parse("cx needs two qubits".to_string()))?,
                size,
            )?;
            let target = parse_qubit_ref(
                parts.next().ok_or_else(|| Error::Parse("cx needs two qubits".to_string()))?,
                size,
            )?;
            if parts.next().is_some() {
                return Err(Error::Parse("cx takes exactly two qubits".to_string()));
            }
            if control == target {
                return Err(Error::Parse("cx control equals target".to_string()));
            }
            gates.push(Gate::Cnot { control, target });
        } else if let Some(rest) = stmt.strip_prefix("u3") {
            let size = size.ok_or_else(|| Error::Parse("gate before qreg".to_string()))?;
            let rest = rest.trim();
            let open = rest
                .find('(')
                .ok_or_else(|| Error::Parse(format!("bad u3 statement '{rest}'")))?;
            let close = rest
                .rfind(')')
                .ok_or_else(|| Error::Parse(format!("bad u3 statement '{rest}'")))?;
            let args: Vec<&str> = rest[open + 1..close].split(',').collect();
            if args.len() != 3 {
                return Err(Error::Parse(format!(
                    "u3 takes three parameters, got {}",
                    args.len()
                )));
            }
            let theta = parse_f64(args[0])?;
            let phi = parse_f64(args[1])?;
            let lambda = parse_f64(args[2])?;
            let qubit = parse_qubit_ref(&rest[close + 1..], size)?;
            gates.push(Gate::U3 { qubit, theta, phi, lambda });
        } else {
            return Err(Error::Parse(format!(
                "unsupported statement '{}'",
                stmt.split_whitespace().next().unwrap_or(stmt)
            )));
        }
    }
    if !saw_version {
        return Err(Error::Parse("missing OPENQASM version header".to_string()));
    }
    let qubits = size.ok_or_else(|| Error::Parse("missing qreg declaration".to_string()))?;
    if qubits != m * w {
        return Err(Error::Parse(format!(
            "register size {qubits} does not match metadata m·w = {}",
            m * w
        )));
    }
    Ok(Circuit {
        qubits,
        gates,
        m,
        n,
        w,
        mode,
        element_ranges: Vec::new(),
        diagonal_range: 0..0,
    })
}

/// Timing split of a compile run, mirroring the two dominant subroutines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompileTiming {
    /// Ladder lifting plus Hamiltonian exponentiation, all elements.
    pub matrix_exponentiation_ms: f64,
    /// Gate synthesis of all blocks and the diagonal, plus assembly.
    pub circuit_synthesis_ms: f64,
    pub total_ms: f64,
}

/// Full compile output: the circuit, its statistics, the decomposition it
/// came from, and the worst per-block synthesis reconstruction error.
#[derive(Debug, Clone)]
pub struct Compiled {
    pub circuit: Circuit,
    pub stats: CircuitStats,
    pub decomposition: ClementsDecomposition,
    pub max_reconstruction_error: f64,
    pub timing: CompileTiming,
}

/// End-to-end compile: interferometer decomposition, per-element truncated
/// exponentials, gate synthesis, and assembly.
pub fn compile(spec: &InterferometerSpec, config: &TruncationConfig) -> Result<Compiled> {
    let started = Instant::now();
    let decomposition = crate::clements::decompose(spec);

    let exp_started = Instant::now();
    let lifted: Vec<ComplexMatrix> = decomposition
        .elements
        .iter()
        .map(|element| {
            crate::fock::truncated_beamsplitter_unitary(element, config).map(|t| t.matrix)
        })
        .collect::<Result<_>>()?;
    let matrix_exponentiation_ms = exp_started.elapsed().as_secs_f64() * 1e3;

    let synth_started = Instant::now();
    let blocks: Vec<SynthesisResult> = crate::par::map_slice(&lifted, synthesize)
        .into_iter()
        .collect::<Result<_>>()?;
    let diag = mode_phase_diagonal(&decomposition.output_phases, config)?;
    let mut max_reconstruction_error = diag.reconstruction_error;
    for block in &blocks {
        max_reconstruction_error = max_reconstruction_error.max(block.reconstruction_error);
    }
    let circuit = assemble(&decomposition, &blocks, &diag, config)?;
    let circuit_synthesis_ms = synth_started.elapsed().as_secs_f64() * 1e3;

    Ok(Compiled {
        stats: stats(&circuit),
        circuit,
        decomposition,
        max_reconstruction_error,
        timing: CompileTiming {
            matrix_exponentiation_ms,
            circuit_synthesis_ms,
            total_ms: started.elapsed().as_secs_f64() * 1e3,
        },
    })
}
