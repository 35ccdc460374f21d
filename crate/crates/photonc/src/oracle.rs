//! Permanent-based ground truth for interferometer transition amplitudes.
//!
//! Completely independent of the compilation pipeline: amplitudes come
//! straight from the mode unitary via matrix permanents, so agreement with
//! the simulated circuit validates every stage at once.

use crate::fock::{enumerate_fock_states, FockState};
use crate::linalg::ComplexMatrix;
use crate::sim::OutcomeDistribution;
use crate::{Error, InterferometerSpec, Result};
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Largest matrix the permanent routines accept (cost 2^n·n).
pub const MAX_PERMANENT_DIM: usize = 20;

/// One transition-amplitude request: ⟨output| U^(n) |input⟩ for the
/// interferometer U. Defined as 0 when the photon totals differ.
pub struct AmplitudeQuery<'a> {
    pub spec: &'a InterferometerSpec,
    pub input: &'a FockState,
    pub output: &'a FockState,
}

/// Permanent via Ryser's formula with Gray-code subset iteration:
/// per(A) = (−1)^n Σ_{∅≠S⊆[n]} (−1)^{|S|} ∏_i Σ_{j∈S} A_ij.
pub fn permanent(a: &ComplexMatrix) -> Result<Complex64> {
    if a.nrows() != a.ncols() {
        return Err(Error::Dimension(format!(
            "permanent needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let n = a.nrows();
    if n > MAX_PERMANENT_DIM {
        return Err(Error::Resource(format!(
            "permanent of a {n}x{n} matrix exceeds the n = {MAX_PERMANENT_DIM} cost guard"
        )));
    }
    if n == 0 {
        return Ok(Complex64::ONE);
    }
    let mut row_sums = vec![Complex64::ZERO; n];
    let mut total = Complex64::ZERO;
    let mut prev = 0usize;
    for k in 1usize..(1 << n) {
        let gray = k ^ (k >> 1);
        let bit = (gray ^ prev).trailing_zeros() as usize;
        if gray & (1 << bit) != 0 {
            for i in 0..n {
                row_sums[i] += a[(i, bit)];
            }
        } else {
            for i in 0..n {
                row_sums[i] -= a[(i, bit)];
            }
        }
        prev = gray;
        let prod: Complex64 = row_sums.iter().product();
        if gray.count_ones().is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    if !n.is_multiple_of(2) {
        total = -total;
    }
    Ok(total)
}

/// Reference permanent by direct row expansion, O(n·n!). Exists only to
/// cross-check Ryser in tests; keep n small.
pub fn naive_permanent(a: &ComplexMatrix) -> Result<Complex64> {
    if a.nrows() != a.ncols() {
        return Err(Error::Dimension(format!(
            "permanent needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let n = a.nrows();
    if n > 10 {
        return Err(Error::Resource(format!(
            "naive permanent of a {n}x{n} matrix is infeasible"
        )));
    }
    fn expand(a: &ComplexMatrix, row: usize, used: usize) -> Complex64 {
        let n = a.nrows();
        if row == n {
            return Complex64::ONE;
        }
        let mut acc = Complex64::ZERO;
        for col in 0..n {
            if used & (1 << col) == 0 {
                acc += a[(row, col)] * expand(a, row + 1, used | (1 << col));
            }
        }
        acc
    }
    Ok(expand(a, 0, 0))
}

/// n! as f64, exact in u64 up to 20!.
fn factorial(k: usize) -> f64 {
    debug_assert!(k <= 20);
    (1..=k as u64).product::<u64>() as f64
}

/// ⟨t| U^(n) |s⟩ = per(W) / √(∏ sᵢ! ∏ tⱼ!), where W repeats column i of U
/// sᵢ times (inputs select columns) and row j tⱼ times (outputs select
/// rows). Mismatched photon totals give amplitude 0.
pub fn transition_amplitude(q: &AmplitudeQuery) -> Result<Complex64> {
    let m = q.spec.modes();
    if q.input.modes() != m || q.output.modes() != m {
        return Err(Error::Dimension(format!(
            "query states have {} and {} modes, interferometer has {m}",
            q.input.modes(),
            q.output.modes()
        )));
    }
    let n = q.input.total_photons();
    if n != q.output.total_photons() {
        return Ok(Complex64::ZERO);
    }
    if n > MAX_PERMANENT_DIM {
        return Err(Error::Resource(format!(
            "transition of {n} photons exceeds the n = {MAX_PERMANENT_DIM} cost guard"
        )));
    }

    let u = q.spec.matrix();
    let col_modes: Vec<usize> = q
        .input
        .occupations
        .iter()
        .enumerate()
        .flat_map(|(i, &s)| std::iter::repeat_n(i, s))
        .collect();
    let row_modes: Vec<usize> = q
        .output
        .occupations
        .iter()
        .enumerate()
        .flat_map(|(j, &t)| std::iter::repeat_n(j, t))
        .collect();
    let mut w = ComplexMatrix::zeros(n, n);
    for (r, &out_mode) in row_modes.iter().enumerate() {
        for (c, &in_mode) in col_modes.iter().enumerate() {
            w[(r, c)] = u[(out_mode, in_mode)];
        }
    }

    let mut norm_sq = 1.0f64;
    for &s in &q.input.occupations {
        norm_sq *= factorial(s);
    }
    for &t in &q.output.occupations {
        norm_sq *= factorial(t);
    }
    Ok(permanent(&w)? / norm_sq.sqrt())
}

/// Exact output distribution for input `s`: |amplitude|² over every
/// occupation vector with the same photon total. Residual is structurally 0.
pub fn exact_distribution(
    spec: &InterferometerSpec,
    input: &FockState,
) -> Result<OutcomeDistribution> {
    let m = spec.modes();
    if input.modes() != m {
        return Err(Error::Dimension(format!(
            "input has {} modes, interferometer has {m}",
            input.modes()
        )));
    }
    let n = input.total_photons();
    if n > MAX_PERMANENT_DIM {
        return Err(Error::Resource(format!(
            "distribution over {n} photons exceeds the n = {MAX_PERMANENT_DIM} cost guard"
        )));
    }
    if m > 12 {
        return Err(Error::Resource(format!(
            "distribution over {m} modes exceeds the 12-mode outcome guard"
        )));
    }
    let outcomes = enumerate_fock_states(m, n);
    let probs: Vec<Result<f64>> = crate::par::map_slice(&outcomes, |t| {
        let query = AmplitudeQuery { spec, input, output: t };
        transition_amplitude(&query).map(|a| a.norm_sqr())
    });
    let mut entries = BTreeMap::new();
    for (t, p) in outcomes.into_iter().zip(probs) {
        entries.insert(t, p?);
    }
    Ok(OutcomeDistribution { entries, residual: 0.0 })
}
