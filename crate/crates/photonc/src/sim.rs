//! Dense statevector simulation of compiled circuits.
//!
//! The simulator replays the gate list on a 2^(m·w) amplitude vector, groups
//! the output mass by decoded occupation vector, and draws multinomial shot
//! counts. It is the circuit-side half of the validation story; the
//! permanent-based [`crate::oracle`] is the other half.

use crate::circuit::Circuit;
use crate::fock::{encode_fock, enumerate_fock_states, FockState, TruncationConfig};
use crate::synth::{u3_matrix, Gate};
use crate::{Error, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use std::collections::BTreeMap;

/// Hard ceiling on simulated register width; 2^26 amplitudes keep the
/// working set near 1 GiB, inside desk-scale memory.
pub const MAX_SIM_QUBITS: usize = 26;

/// Dense state over `qubits` wires, indexed with qubit 0 as the least
/// significant bit, matching the Fock encoding.
#[derive(Debug, Clone)]
pub struct StateVector {
    pub qubits: usize,
    pub amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Computational basis state |index⟩.
    pub fn basis(qubits: usize, index: usize) -> Result<Self> {
        if qubits > MAX_SIM_QUBITS {
            return Err(Error::Resource(format!(
                "simulation of {qubits} qubits exceeds the {MAX_SIM_QUBITS}-qubit ceiling"
            )));
        }
        let dim = 1usize << qubits;
        if index >= dim {
            return Err(Error::Dimension(format!(
                "basis index {index} out of range for {qubits} qubits"
            )));
        }
        let mut amplitudes = vec![Complex64::ZERO; dim];
        amplitudes[index] = Complex64::ONE;
        Ok(StateVector { qubits, amplitudes })
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// In-place application of one gate, chunk-parallel over disjoint
    /// amplitude blocks; the result is independent of the chunking.
    pub fn apply(&mut self, gate: &Gate) {
        match gate {
            Gate::U3 { qubit, theta, phi, lambda } => {
                let m = u3_matrix(*theta, *phi, *lambda);
                let half = 1usize << qubit;
                crate::par::for_each_chunk_mut(&mut self.amplitudes, 2 * half, |_, chunk| {
                    let (lo, hi) = chunk.split_at_mut(half);
                    for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                        let nx = m[0][0] * *x + m[0][1] * *y;
                        let ny = m[1][0] * *x + m[1][1] * *y;
                        *x = nx;
                        *y = ny;
                    }
                });
            }
            Gate::Cnot { control, target } => {
                let half = 1usize << target;
                let cbit = 1usize << control;
                let chunk_len = 2 * half;
                crate::par::for_each_chunk_mut(&mut self.amplitudes, chunk_len, |i, chunk| {
                    let base = i * chunk_len;
                    for l in 0..half {
                        if (base + l) & cbit != 0 {
                            chunk.swap(l, l + half);
                        }
                    }
                });
            }
        }
    }
}

/// Output mass grouped by occupation vector.
///
/// `entries` covers every configuration with the input's photon total (the
/// only outcomes a photon-conserving circuit can reach), including those at
/// probability zero. `residual` is the leftover mass on bitstrings outside
/// that sector: occupations above the truncation level or totals that
/// differ from the input's, which a faithful compilation keeps ≤ 1e−10.
#[derive(Debug, Clone)]
pub struct OutcomeDistribution {
    pub entries: BTreeMap<FockState, f64>,
    pub residual: f64,
}

impl OutcomeDistribution {
    pub fn probability(&self, state: &FockState) -> f64 {
        self.entries.get(state).copied().unwrap_or(0.0)
    }

    /// Σ probabilities + residual; 1 within 1e−10 for a normalized state.
    pub fn total_mass(&self) -> f64 {
        self.entries.values().sum::<f64>() + self.residual
    }
}

/// Apply the whole circuit to the encoded input state.
pub fn run(c: &Circuit, input: &FockState) -> Result<StateVector> {
    if input.modes() != c.m {
        return Err(Error::Dimension(format!(
            "input has {} modes, circuit expects {}",
            input.modes(),
            c.m
        )));
    }
    if input.total_photons() > c.n {
        return Err(Error::Validation(format!(
            "input carries {} photons, over the compiled budget n = {}",
            input.total_photons(),
            c.n
        )));
    }
    let config = TruncationConfig::new(c.n, c.mode);
    if config.w() != c.w || c.qubits != c.m * c.w {
        return Err(Error::Dimension(format!(
            "inconsistent register layout: m={} n={} implies width {}, circuit claims {}",
            c.m,
            c.n,
            config.w(),
            c.w
        )));
    }
    let index = encode_fock(input, &config)?;
    let mut v = StateVector::basis(c.qubits, index)?;
    for gate in &c.gates {
        v.apply(gate);
    }
    let norm = v.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::Validation(format!(
            "state norm drifted to {norm:.12} during simulation"
        )));
    }
    Ok(v)
}

/// Group |amplitude|² by occupation vector. `photons` is the input's photon
/// total; every configuration of that total becomes an entry, and mass
/// anywhere else in the register is reported as `residual`.
pub fn probabilities(
    v: &StateVector,
    m: usize,
    config: &TruncationConfig,
    photons: usize,
) -> OutcomeDistribution {
    let dim = v.amplitudes.len();
    let mut entries = BTreeMap::new();
    let mut valid_mass = 0.0f64;
    for state in enumerate_fock_states(m, photons) {
        let p = match encode_fock(&state, config) {
            Ok(index) if index < dim => v.amplitudes[index].norm_sqr(),
            _ => 0.0,
        };
        valid_mass += p;
        entries.insert(state, p);
    }
    let norm_sq: f64 = v.amplitudes.iter().map(|a| a.norm_sqr()).sum();
    OutcomeDistribution {
        entries,
        residual: (norm_sq - valid_mass).max(0.0),
    }
}

/// Multinomial sampling by inverse CDF over the canonically ordered
/// outcomes; identical seeds give identical counts. Draws condition on the
/// valid sector (the residual is not a reportable outcome).
pub fn sample(dist: &OutcomeDistribution, shots: u64, seed: u64) -> BTreeMap<FockState, u64> {
    let mut counts: BTreeMap<FockState, u64> =
        dist.entries.keys().map(|s| (s.clone(), 0u64)).collect();
    let states: Vec<&FockState> = dist.entries.keys().collect();
    let mut cumulative = Vec::with_capacity(states.len());
    let mut acc = 0.0f64;
    for p in dist.entries.values() {
        acc += p.max(0.0);
        cumulative.push(acc);
    }
    if states.is_empty() || acc <= 0.0 {
        return counts;
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for _ in 0..shots {
        let u: f64 = rng.random::<f64>() * acc;
        let idx = cumulative.partition_point(|&c| c <= u).min(states.len() - 1);
        *counts.get_mut(states[idx]).expect("key from same map") += 1;
    }
    counts
}
