//! Unitary-to-gate synthesis over the {CNOT, U3} gate set.
//!
//! Single-qubit targets reduce to one U3 via a ZYZ-style extraction. Two-qubit
//! targets use a Weyl-chamber decomposition around three CNOTs. Larger targets
//! recurse through a cosine-sine split: the top qubit carries a multiplexed Ry,
//! and the block-diagonal side factors demultiplex into half-size unitaries
//! plus multiplexed Rz layers. Multiplexed rotations lower to Gray-code CNOT
//! ladders. The recorded global phase makes the gate product exact, not just
//! projectively equal, so downstream assembly can compose blocks freely.

mod csd;
mod kak;

use crate::linalg::{check_unitary, ComplexMatrix, UNITARITY_TOL};
use crate::{Error, Result};
use num_complex::Complex64;

/// Multiplexed-rotation steps this small are dropped during lowering. Well
/// below every downstream tolerance, but wide enough to absorb the float
/// noise that keeps structurally-zero Gray-code coefficients from being
/// exactly 0.0 (e.g. linear phase ramps, which should lower CNOT-free).
const MUX_ZERO_TOL: f64 = 1e-12;

/// A gate in the target set, acting on absolute qubit indices.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    Cnot { control: usize, target: usize },
    U3 { qubit: usize, theta: f64, phi: f64, lambda: f64 },
}

impl Gate {
    /// Highest qubit index touched by this gate.
    pub fn max_qubit(&self) -> usize {
        match self {
            Gate::Cnot { control, target } => (*control).max(*target),
            Gate::U3 { qubit, .. } => *qubit,
        }
    }

    /// Shift every qubit index up by `offset`.
    pub fn shifted(&self, offset: usize) -> Gate {
        match self {
            Gate::Cnot { control, target } => Gate::Cnot {
                control: control + offset,
                target: target + offset,
            },
            Gate::U3 { qubit, theta, phi, lambda } => Gate::U3 {
                qubit: qubit + offset,
                theta: *theta,
                phi: *phi,
                lambda: *lambda,
            },
        }
    }
}

/// Matrix of U3(θ, φ, λ):
/// [[cos(θ/2), −e^{iλ} sin(θ/2)], [e^{iφ} sin(θ/2), e^{i(φ+λ)} cos(θ/2)]].
pub fn u3_matrix(theta: f64, phi: f64, lambda: f64) -> [[Complex64; 2]; 2] {
    let c = Complex64::new((theta / 2.0).cos(), 0.0);
    let s = Complex64::new((theta / 2.0).sin(), 0.0);
    let eiphi = Complex64::new(0.0, phi).exp();
    let eilam = Complex64::new(0.0, lambda).exp();
    [[c, -eilam * s], [eiphi * s, eiphi * eilam * c]]
}

/// Result of synthesizing a k-qubit unitary.
///
/// The gate list realizes the target up to the recorded global phase:
/// target = e^{i·global_phase} · (product of gates in application order).
#[derive(Debug, Clone)]
pub struct SynthesisResult {
    pub gates: Vec<Gate>,
    pub qubits: usize,
    pub reconstruction_error: f64,
    pub cnot_count: usize,
    pub depth: usize,
    pub global_phase: f64,
}

/// Partial synthesis output: target = e^{i·phase} · (gate product).
#[derive(Debug, Clone, Default)]
pub(crate) struct Fragment {
    pub gates: Vec<Gate>,
    pub phase: f64,
}

impl Fragment {
    fn extend(&mut self, other: Fragment) {
        self.gates.extend(other.gates);
        self.phase += other.phase;
    }
}

/// Wrap an angle to (−π, π].
pub(crate) fn wrap_to_pi(x: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let r = x - two_pi * (x / two_pi).round();
    if r <= -std::f64::consts::PI {
        r + two_pi
    } else {
        r
    }
}

/// ZYZ-style angle extraction: u = e^{i·phase} · U3(θ, φ, λ).
///
/// The input is first normalized to SU(2) through its determinant, so each
/// angle is read off a well-scaled entry; no branch divides by a small
/// quantity, and near-diagonal and near-antidiagonal inputs stay exact.
pub(crate) fn zyz_angles(u: &[[Complex64; 2]; 2]) -> (f64, f64, f64, f64) {
    let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
    let gamma = det.arg() / 2.0;
    let unphase = Complex64::new(0.0, -gamma).exp();
    let a = u[0][0] * unphase;
    let b = u[1][0] * unphase;
    let theta = 2.0 * b.norm().atan2(a.norm());
    let arg_a = a.arg();
    let arg_b = b.arg();
    let phi = arg_b - arg_a;
    let lambda = -arg_b - arg_a;
    (theta, phi, lambda, gamma + arg_a)
}

fn single_qubit_fragment(u: &[[Complex64; 2]; 2], qubit: usize) -> Fragment {
    let (theta, phi, lambda, phase) = zyz_angles(u);
    Fragment {
        gates: vec![Gate::U3 { qubit, theta, phi, lambda }],
        phase,
    }
}

pub(crate) fn mat2_from(u: &ComplexMatrix) -> [[Complex64; 2]; 2] {
    [[u[(0, 0)], u[(0, 1)]], [u[(1, 0)], u[(1, 1)]]]
}

#[derive(Clone, Copy, PartialEq)]
pub(crate) enum RotationAxis {
    Y,
    Z,
}

/// Multiplexed rotation: applies Rot(angles[x]) to `target` for every basis
/// state x of the control qubits 0..r (the r low qubits; `target` must sit
/// above them). Lowers to the Gray-code ladder of 2^r CNOTs interleaved with
/// 2^r rotations.
///
/// Rz steps are emitted as U3(0, 0, β) = diag(1, e^{iβ}) = e^{iβ/2}·Rz(β); the
/// accumulated extra phase is returned through the fragment.
pub(crate) fn multiplexed_rotation(angles: &[f64], target: usize, axis: RotationAxis) -> Fragment {
    let size = angles.len();
    debug_assert!(size.is_power_of_two());
    let r = size.trailing_zeros() as usize;
    debug_assert!(target >= r, "controls occupy qubits below the target");
    if r == 0 {
        let beta = angles[0];
        return match axis {
            RotationAxis::Y => Fragment {
                gates: vec![Gate::U3 { qubit: target, theta: beta, phi: 0.0, lambda: 0.0 }],
                phase: 0.0,
            },
            RotationAxis::Z => Fragment {
                gates: vec![Gate::U3 { qubit: target, theta: 0.0, phi: 0.0, lambda: beta }],
                phase: -beta / 2.0,
            },
        };
    }

    // betas = (1/2^r) Mᵀ angles with M_{x,j} = (−1)^{⟨x, gray(j)⟩}; the ladder
    // then applies Rot(Σ_j (−1)^{⟨x, gray(j)⟩} β_j) = Rot(angles[x]) for every
    // control state x.
    let gray = |j: usize| j ^ (j >> 1);
    let mut betas = vec![0.0f64; size];
    for (j, beta) in betas.iter_mut().enumerate() {
        let g = gray(j);
        let mut acc = 0.0;
        for (x, &alpha) in angles.iter().enumerate() {
            if (x & g).count_ones() % 2 == 0 {
                acc += alpha;
            } else {
                acc -= alpha;
            }
        }
        *beta = acc / size as f64;
    }

    // Negligible β steps are skipped. The CNOTs around a skipped rotation
    // are not dropped outright; their control toggles accumulate in a parity
    // mask that is flushed before the next emitted rotation. Same-target
    // CNOTs commute and each control appears an even number of times across
    // the full ladder, so a trailing mask is always empty for all-zero β and
    // the emitted circuit stays exactly equivalent otherwise.
    let mut gates = Vec::with_capacity(2 * size);
    let mut phase = 0.0;
    let mut pending: usize = 0;
    for (j, &beta) in betas.iter().enumerate() {
        if beta.abs() > MUX_ZERO_TOL {
            let mut mask = pending;
            while mask != 0 {
                let control = mask.trailing_zeros() as usize;
                gates.push(Gate::Cnot { control, target });
                mask &= mask - 1;
            }
            pending = 0;
            match axis {
                RotationAxis::Y => {
                    gates.push(Gate::U3 { qubit: target, theta: beta, phi: 0.0, lambda: 0.0 });
                }
                RotationAxis::Z => {
                    gates.push(Gate::U3 { qubit: target, theta: 0.0, phi: 0.0, lambda: beta });
                    phase -= beta / 2.0;
                }
            }
        }
        // Bit flipped between consecutive Gray codes; the final CNOT closes
        // the cycle back to gray(0) via the top control bit.
        let control = if j + 1 == size {
            r - 1
        } else {
            (j + 1).trailing_zeros() as usize
        };
        pending ^= 1 << control;
    }
    let mut mask = pending;
    while mask != 0 {
        let control = mask.trailing_zeros() as usize;
        gates.push(Gate::Cnot { control, target });
        mask &= mask - 1;
    }
    Fragment { gates, phase }
}

/// Split a multiplexed unitary diag(x1, x2) into (I⊗V) · muxRz(angles) · (I⊗W).
///
/// V comes from the eigenbasis of x1·x2†; the diagonal eigenphases split in
/// half between the Rz layer and W = D†V†x1.
fn demultiplex(
    x1: &ComplexMatrix,
    x2: &ComplexMatrix,
) -> Result<(ComplexMatrix, Vec<f64>, ComplexMatrix)> {
    let t = x1 * x2.adjoint();
    let (v, phases) = crate::linalg::unitary_eigen(&t)?;
    let h = x1.nrows();
    let half: Vec<f64> = phases.iter().map(|p| p / 2.0).collect();
    let d_conj = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        h,
        half.iter().map(|&p| Complex64::new(0.0, -p).exp()),
    ));
    let w = d_conj * v.adjoint() * x1;
    // diag(D, D†) on the top qubit is Rz(−φ) multiplexed over the low qubits.
    let rz_angles: Vec<f64> = phases.iter().map(|p| -p).collect();
    Ok((v, rz_angles, w))
}

/// Recursive synthesis core. `k` is the qubit count; the unitary acts on
/// qubits 0..k of the final circuit.
fn synthesize_fragment(u: &ComplexMatrix, k: usize) -> Result<Fragment> {
    match k {
        1 => Ok(single_qubit_fragment(&mat2_from(u), 0)),
        2 => kak::two_qubit_fragment(u),
        _ => {
            let split = csd::cosine_sine(u)?;
            let top = k - 1;

            let (vr, ar, wr) = demultiplex(&split.w1.adjoint(), &split.w2.adjoint())?;
            let (vl, al, wl) = demultiplex(&split.v1, &split.v2)?;
            let ry_angles: Vec<f64> = split.theta.iter().map(|t| 2.0 * t).collect();

            let mut frag = Fragment::default();
            frag.extend(synthesize_fragment(&wr, k - 1)?);
            frag.extend(multiplexed_rotation(&ar, top, RotationAxis::Z));
            frag.extend(synthesize_fragment(&vr, k - 1)?);
            frag.extend(multiplexed_rotation(&ry_angles, top, RotationAxis::Y));
            frag.extend(synthesize_fragment(&wl, k - 1)?);
            frag.extend(multiplexed_rotation(&al, top, RotationAxis::Z));
            frag.extend(synthesize_fragment(&vl, k - 1)?);
            Ok(frag)
        }
    }
}

/// Collapse runs of U3 gates that act on the same qubit with no intervening
/// gate on that wire. A run that multiplies out to a pure phase is dropped
/// entirely. Returns the compacted list and the phase picked up by
/// re-extracting angles. CNOTs are never touched.
pub(crate) fn merge_adjacent_u3(gates: Vec<Gate>) -> (Vec<Gate>, f64) {
    let mut out: Vec<Option<Gate>> = Vec::with_capacity(gates.len());
    let mut last_on_wire: Vec<Option<usize>> = Vec::new();
    let mut phase = 0.0f64;

    let note_wire = |wires: &mut Vec<Option<usize>>, q: usize, idx: Option<usize>| {
        if wires.len() <= q {
            wires.resize(q + 1, None);
        }
        wires[q] = idx;
    };

    for gate in gates {
        match gate {
            Gate::Cnot { control, target } => {
                let idx = out.len();
                out.push(Some(gate));
                note_wire(&mut last_on_wire, control, Some(idx));
                note_wire(&mut last_on_wire, target, Some(idx));
            }
            Gate::U3 { qubit, theta, phi, lambda } => {
                // Identity gates carry no phase either (φ and λ cancel);
                // skipping them keeps the wire's previous gate mergeable.
                if theta.abs() < 1e-14 && wrap_to_pi(phi + lambda).abs() < 1e-14 {
                    continue;
                }
                let prev = last_on_wire.get(qubit).copied().flatten();
                let merged = match prev {
                    Some(idx) => match &out[idx] {
                        Some(Gate::U3 {
                            qubit: pq,
                            theta: pt,
                            phi: pp,
                            lambda: pl,
                        }) if *pq == qubit => {
                            let ma = u3_matrix(*pt, *pp, *pl);
                            let mb = u3_matrix(theta, phi, lambda);
                            // Application order: previous gate first.
                            let mut prod = [[Complex64::ZERO; 2]; 2];
                            for r in 0..2 {
                                for c in 0..2 {
                                    prod[r][c] = mb[r][0] * ma[0][c] + mb[r][1] * ma[1][c];
                                }
                            }
                            let (nt, np, nl, ph) = zyz_angles(&prod);
                            phase += ph;
                            if nt.abs() < 1e-14 && wrap_to_pi(np + nl).abs() < 1e-14 {
                                out[idx] = None;
                                note_wire(&mut last_on_wire, qubit, None);
                            } else {
                                out[idx] = Some(Gate::U3 {
                                    qubit,
                                    theta: nt,
                                    phi: np,
                                    lambda: nl,
                                });
                            }
                            true
                        }
                        _ => false,
                    },
                    None => false,
                };
                if !merged {
                    let idx = out.len();
                    out.push(Some(gate));
                    note_wire(&mut last_on_wire, qubit, Some(idx));
                }
            }
        }
    }
    (out.into_iter().flatten().collect(), phase)
}

/// Wavefront circuit depth: each gate lands one layer past the latest layer
/// among its wires.
pub(crate) fn wavefront_depth(gates: &[Gate]) -> usize {
    let mut level: Vec<usize> = Vec::new();
    let mut depth = 0usize;
    for gate in gates {
        let hi = gate.max_qubit();
        if level.len() <= hi {
            level.resize(hi + 1, 0);
        }
        let layer = match gate {
            Gate::Cnot { control, target } => level[*control].max(level[*target]) + 1,
            Gate::U3 { qubit, .. } => level[*qubit] + 1,
        };
        match gate {
            Gate::Cnot { control, target } => {
                level[*control] = layer;
                level[*target] = layer;
            }
            Gate::U3 { qubit, .. } => level[*qubit] = layer,
        }
        depth = depth.max(layer);
    }
    depth
}

pub(crate) fn count_cnots(gates: &[Gate]) -> usize {
    gates.iter().filter(|g| matches!(g, Gate::Cnot { .. })).count()
}

/// Dense working matrix in row-major order, used to replay a gate list.
pub(crate) struct GateMatrix {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

impl GateMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Complex64::ZERO; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::ONE;
        }
        GateMatrix { dim, data }
    }

    /// Left-multiply by the gate: self ← G · self.
    pub fn apply(&mut self, gate: &Gate) {
        let dim = self.dim;
        match gate {
            Gate::U3 { qubit, theta, phi, lambda } => {
                let m = u3_matrix(*theta, *phi, *lambda);
                let bit = 1usize << qubit;
                for r0 in 0..dim {
                    if r0 & bit != 0 {
                        continue;
                    }
                    let r1 = r0 | bit;
                    let (lo, hi) = self.data.split_at_mut(r1 * dim);
                    let row0 = &mut lo[r0 * dim..r0 * dim + dim];
                    let row1 = &mut hi[..dim];
                    for (x, y) in row0.iter_mut().zip(row1.iter_mut()) {
                        let nx = m[0][0] * *x + m[0][1] * *y;
                        let ny = m[1][0] * *x + m[1][1] * *y;
                        *x = nx;
                        *y = ny;
                    }
                }
            }
            Gate::Cnot { control, target } => {
                let cbit = 1usize << control;
                let tbit = 1usize << target;
                for r in 0..dim {
                    if r & cbit != 0 && r & tbit == 0 {
                        let r2 = r | tbit;
                        let (lo, hi) = self.data.split_at_mut(r2 * dim);
                        lo[r * dim..r * dim + dim].swap_with_slice(&mut hi[..dim]);
                    }
                }
            }
        }
    }

    /// max |target − e^{iφ}·self| over all entries.
    pub fn max_diff_up_to_phase(&self, target: &ComplexMatrix, phase: f64) -> f64 {
        let factor = Complex64::new(0.0, phase).exp();
        let dim = self.dim;
        let mut worst = 0.0f64;
        for r in 0..dim {
            for c in 0..dim {
                let diff = (target[(r, c)] - factor * self.data[r * dim + c]).norm();
                worst = worst.max(diff);
            }
        }
        worst
    }
}

pub(crate) fn gates_to_matrix(gates: &[Gate], qubits: usize) -> GateMatrix {
    let mut m = GateMatrix::identity(1usize << qubits);
    for gate in gates {
        m.apply(gate);
    }
    m
}

fn qubit_count_for(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::Dimension(format!(
            "synthesis target must be 2^k x 2^k with k >= 1, got dimension {dim}"
        )));
    }
    Ok(dim.trailing_zeros() as usize)
}

fn finish(frag: Fragment, qubits: usize, target: &ComplexMatrix) -> SynthesisResult {
    let (gates, merge_phase) = merge_adjacent_u3(frag.gates);
    let global_phase = wrap_to_pi(frag.phase + merge_phase);
    let rebuilt = gates_to_matrix(&gates, qubits);
    let reconstruction_error = rebuilt.max_diff_up_to_phase(target, global_phase);
    SynthesisResult {
        cnot_count: count_cnots(&gates),
        depth: wavefront_depth(&gates),
        qubits,
        reconstruction_error,
        global_phase,
        gates,
    }
}

/// Synthesize a 2^k × 2^k unitary into CNOT + U3 gates on qubits 0..k.
pub fn synthesize(u: &ComplexMatrix) -> Result<SynthesisResult> {
    if u.nrows() != u.ncols() {
        return Err(Error::Dimension(format!(
            "synthesis target must be square, got {}x{}",
            u.nrows(),
            u.ncols()
        )));
    }
    let qubits = qubit_count_for(u.nrows())?;
    let report = check_unitary(u, UNITARITY_TOL)?;
    if !report.passed {
        return Err(Error::Validation(format!(
            "synthesis target is not unitary: deviation {:.3e} exceeds {:.0e}",
            report.max_deviation, UNITARITY_TOL
        )));
    }
    let frag = synthesize_fragment(u, qubits)?;
    Ok(finish(frag, qubits, u))
}

fn diagonal_fragment(phases: &[f64], k: usize) -> Fragment {
    if k == 0 {
        return Fragment { gates: Vec::new(), phase: phases[0] };
    }
    let h = 1usize << (k - 1);
    let mut delta = Vec::with_capacity(h);
    let mut mid = Vec::with_capacity(h);
    for x in 0..h {
        delta.push(phases[x + h] - phases[x]);
        mid.push((phases[x + h] + phases[x]) / 2.0);
    }
    let mut frag = diagonal_fragment(&mid, k - 1);
    if delta.iter().any(|&d| d != 0.0) {
        frag.extend(multiplexed_rotation(&delta, k - 1, RotationAxis::Z));
    }
    frag
}

/// Synthesize diag(e^{iφ_0}, …, e^{iφ_{2^k−1}}) into CNOT + U3 gates.
/// A constant phase vector produces an empty gate list with the phase
/// carried in `global_phase`.
pub fn synthesize_diagonal(phases: &[f64]) -> Result<SynthesisResult> {
    let dim = phases.len();
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::Dimension(format!(
            "diagonal must have 2^k entries, got {dim}"
        )));
    }
    let k = dim.trailing_zeros() as usize;
    let frag = diagonal_fragment(phases, k);
    let target = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        dim,
        phases.iter().map(|&p| Complex64::new(0.0, p).exp()),
    ));
    // A 1-entry diagonal is a bare phase; skip the matrix replay shortcut of
    // `finish` only in that degenerate case.
    if k == 0 {
        return Ok(SynthesisResult {
            gates: Vec::new(),
            qubits: 0,
            reconstruction_error: 0.0,
            cnot_count: 0,
            depth: 0,
            global_phase: wrap_to_pi(frag.phase),
        });
    }
    Ok(finish(frag, k, &target))
}
