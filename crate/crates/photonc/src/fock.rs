//! Truncated bosonic ladder operators, the second-quantized lift of a
//! two-mode Hamiltonian onto qubit registers, and Fock-state enumeration
//! and encoding.
//!
//! Each optical mode gets a register of w qubits holding its occupation
//! number in binary; mode 0 is the least significant register. A photon
//! budget n fixes w and the per-register dimension d = 2^w. Registers can
//! either represent occupations up to d−1 (`ExpandTruncation`) or keep the
//! physical cutoff at n and zero-pad the operators (`PadToPowerOfTwo`),
//! in which case basis states with occupation above n are exact fixed
//! points of every lifted unitary.

use num_complex::Complex64;

use crate::linalg::{matrix_exp_hermitian, matrix_log_unitary, ComplexMatrix, HERMITICITY_TOL};
use crate::clements::BeamsplitterElement;
use crate::{Error, Result};

/// Register expansion strategy for the non-power-of-two Fock cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpansionMode {
    /// Keep the cutoff at n photons and pad operators with zeros up to d.
    PadToPowerOfTwo,
    /// Raise the cutoff to d−1 so the ladder fills the whole register.
    ExpandTruncation,
}

/// Photon budget plus derived register geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncationConfig {
    /// Maximum total photon number n.
    pub n: usize,
    pub mode: ExpansionMode,
    w: usize,
    d: usize,
}

impl TruncationConfig {
    pub fn new(n: usize, mode: ExpansionMode) -> Self {
        // ⌈log₂(n+1)⌉, floored at one qubit so n = 0 still gets a register.
        let w = ((n + 1).next_power_of_two().trailing_zeros() as usize).max(1);
        Self { n, mode, w, d: 1 << w }
    }

    /// Qubits per mode register.
    pub fn w(&self) -> usize {
        self.w
    }

    /// Per-mode register dimension 2^w.
    pub fn d(&self) -> usize {
        self.d
    }

    /// Highest occupation the ladder operators act on.
    pub fn truncation_level(&self) -> usize {
        match self.mode {
            ExpansionMode::PadToPowerOfTwo => self.n,
            ExpansionMode::ExpandTruncation => self.d - 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderKind {
    Creation,
    Annihilation,
}

/// A d×d truncated creation or annihilation operator.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderOperator {
    pub dim: usize,
    pub kind: LadderKind,
    pub matrix: ComplexMatrix,
}

/// Builds the truncated ladder operator for `config`: creation has
/// (k+1, k) = √(k+1) for k below the truncation level, zeros elsewhere,
/// and annihilation is its adjoint.
pub fn ladder(config: &TruncationConfig, kind: LadderKind) -> LadderOperator {
    let d = config.d();
    let trunc = config.truncation_level();
    let mut m = ComplexMatrix::zeros(d, d);
    for k in 0..trunc {
        m[(k + 1, k)] = Complex64::new(((k + 1) as f64).sqrt(), 0.0);
    }
    let matrix = match kind {
        LadderKind::Creation => m,
        LadderKind::Annihilation => m.adjoint(),
    };
    LadderOperator { dim: d, kind, matrix }
}

// Identity restricted to occupations within the truncation level; under
// padding this zeroes the rows/columns of the unreachable states so they
// drop out of every lifted Hamiltonian term.
fn register_identity(config: &TruncationConfig) -> ComplexMatrix {
    let d = config.d();
    let trunc = config.truncation_level();
    let mut m = ComplexMatrix::zeros(d, d);
    for k in 0..=trunc {
        m[(k, k)] = Complex64::ONE;
    }
    m
}

// Two-register tensor product with `lo` on the less significant register
// (mode 0) and `hi` on the more significant one.
fn tensor_modes(lo: &ComplexMatrix, hi: &ComplexMatrix) -> ComplexMatrix {
    hi.kronecker(lo)
}

/// Lifts a 2×2 single-particle Hamiltonian h onto the two-register space:
/// H = Σᵢⱼ hᵢⱼ âᵢ†âⱼ with truncated (and, under padding, zero-padded)
/// ladder operators. Result is d²×d² and exactly Hermitian.
pub fn lift_two_mode(h: &ComplexMatrix, config: &TruncationConfig) -> Result<ComplexMatrix> {
    if h.nrows() != 2 || h.ncols() != 2 {
        return Err(Error::Dimension(format!(
            "two-mode lift needs a 2x2 matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    let herm_dev = (h[(0, 1)] - h[(1, 0)].conj()).norm().max(
        h[(0, 0)].im.abs().max(h[(1, 1)].im.abs()),
    );
    if herm_dev > HERMITICITY_TOL {
        return Err(Error::Validation(format!(
            "two-mode lift requires Hermitian h, deviation {herm_dev:.3e}"
        )));
    }

    let create = ladder(config, LadderKind::Creation).matrix;
    let destroy = ladder(config, LadderKind::Annihilation).matrix;
    let number = &create * &destroy;
    let ident = register_identity(config);

    let mut lifted = tensor_modes(&number, &ident).map(|z| z * h[(0, 0)]);
    lifted += tensor_modes(&create, &destroy).map(|z| z * h[(0, 1)]);
    lifted += tensor_modes(&destroy, &create).map(|z| z * h[(1, 0)]);
    lifted += tensor_modes(&ident, &number).map(|z| z * h[(1, 1)]);

    // Scrub rounding asymmetry; the exponential downstream validates
    // Hermiticity strictly.
    let adj = lifted.adjoint();
    lifted = (lifted + adj).map(|z| z * 0.5);
    Ok(lifted)
}

/// The two-register unitary generated by an arbitrary 2×2 beamsplitter
/// unitary t: exp(i·lift(−i log t)).
pub fn truncated_two_mode_unitary(
    t: &ComplexMatrix,
    config: &TruncationConfig,
) -> Result<ComplexMatrix> {
    let h = matrix_log_unitary(t)?;
    let lifted = lift_two_mode(&h, config)?;
    matrix_exp_hermitian(&lifted, Complex64::I)
}

/// A beamsplitter lifted to its 4^w-dimensional truncated unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedUnitary {
    /// 2w: the two occupation registers the matrix acts on.
    pub qubits: usize,
    pub matrix: ComplexMatrix,
    pub source: BeamsplitterElement,
    pub config: TruncationConfig,
}

/// Runs the per-element pipeline: take the matrix logarithm of the 2×2
/// beamsplitter, lift it, exponentiate.
pub fn truncated_beamsplitter_unitary(
    b: &BeamsplitterElement,
    config: &TruncationConfig,
) -> Result<TruncatedUnitary> {
    let matrix = truncated_two_mode_unitary(&b.matrix2(), config)?;
    Ok(TruncatedUnitary {
        qubits: 2 * config.w(),
        matrix,
        source: *b,
        config: *config,
    })
}

/// Occupation-number state (s₀, …, s_{m−1}). Ordering is lexicographic on
/// the occupation vector, giving reporting and sampling a canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockState {
    pub occupations: Vec<usize>,
}

impl FockState {
    pub fn new(occupations: Vec<usize>) -> Self {
        Self { occupations }
    }

    pub fn modes(&self) -> usize {
        self.occupations.len()
    }

    pub fn total_photons(&self) -> usize {
        self.occupations.iter().sum()
    }
}

impl std::fmt::Display for FockState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.occupations.iter().map(|s| s.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Number of m-mode occupation vectors with exactly n total photons:
/// C(n+m−1, n).
pub fn fock_space_dimension(m: usize, n: usize) -> usize {
    let mut acc: u128 = 1;
    for k in 0..n {
        acc = acc * (m + k) as u128 / (k + 1) as u128;
    }
    acc as usize
}

/// All m-mode occupation vectors with Σsᵢ = n, in ascending lexicographic
/// order.
pub fn enumerate_fock_states(m: usize, n: usize) -> Vec<FockState> {
    assert!(m >= 1, "need at least one mode");
    let mut out = Vec::with_capacity(fock_space_dimension(m, n));
    let mut current = vec![0usize; m];
    fill_states(&mut current, 0, n, &mut out);
    out
}

fn fill_states(current: &mut Vec<usize>, pos: usize, remaining: usize, out: &mut Vec<FockState>) {
    if pos == current.len() - 1 {
        current[pos] = remaining;
        out.push(FockState::new(current.clone()));
        return;
    }
    for s in 0..=remaining {
        current[pos] = s;
        fill_states(current, pos + 1, remaining - s, out);
    }
    current[pos] = 0;
}

/// Computational-basis index of a Fock state: Σᵢ sᵢ·dⁱ, mode 0 least
/// significant. This equals the qubit-register index when mode i occupies
/// qubits [i·w, (i+1)·w).
pub fn encode_fock(s: &FockState, config: &TruncationConfig) -> Result<usize> {
    let d = config.d();
    let mut index = 0usize;
    for (i, &occ) in s.occupations.iter().enumerate() {
        if occ >= d {
            return Err(Error::Validation(format!(
                "occupation {occ} in mode {i} does not fit a register of dimension {d}"
            )));
        }
        index += occ * d.pow(i as u32);
    }
    Ok(index)
}

/// Inverse of [`encode_fock`] for an m-mode register file.
pub fn decode_fock(index: usize, m: usize, config: &TruncationConfig) -> FockState {
    let d = config.d();
    let mut rest = index;
    let mut occupations = Vec::with_capacity(m);
    for _ in 0..m {
        occupations.push(rest % d);
        rest /= d;
    }
    debug_assert_eq!(rest, 0, "index beyond register file");
    FockState::new(occupations)
}
