//! Rectangular decomposition of an m-mode interferometer into a grid of
//! adjacent-mode beamsplitters plus residual per-mode output phases, and
//! the reverse product used to verify it.
//!
//! The factored form is U = D · T_K ··· T_1 with D diagonal, so element 1
//! acts first on a state and the phases come last. Lower-triangle entries
//! are nulled one anti-diagonal at a time, alternating column operations
//! (T⁻¹ from the right) and row operations (T from the left); the left
//! factors are then commuted through the residual diagonal.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::linalg::ComplexMatrix;
use crate::InterferometerSpec;

const TAU: f64 = 2.0 * PI;

fn wrap_tau(x: f64) -> f64 {
    let w = x.rem_euclid(TAU);
    // rem_euclid can return TAU itself when x is a tiny negative number.
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// One beamsplitter of the rectangular grid, coupling modes
/// (mode_lo, mode_lo + 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamsplitterElement {
    /// Lower of the two coupled modes, 0-based; 0 ≤ mode_lo ≤ m−2.
    pub mode_lo: usize,
    /// Reflectivity angle in [0, π/2]; θ = π/2 is perfectly reflective.
    pub theta: f64,
    /// Relative phase in [0, 2π).
    pub phi: f64,
    /// Index in application order.
    pub position: usize,
}

impl BeamsplitterElement {
    /// The 2×2 beamsplitter unitary
    /// [[e^{iφ}cosθ, −sinθ], [e^{iφ}sinθ, cosθ]].
    pub fn matrix2(&self) -> ComplexMatrix {
        let (s, c) = self.theta.sin_cos();
        let ph = Complex64::from_polar(1.0, self.phi);
        ComplexMatrix::from_row_slice(
            2,
            2,
            &[
                ph * c,
                Complex64::new(-s, 0.0),
                ph * s,
                Complex64::new(c, 0.0),
            ],
        )
    }

    /// The beamsplitter embedded into an m×m identity at its mode pair.
    pub fn embedded(&self, m: usize) -> ComplexMatrix {
        assert!(self.mode_lo + 1 < m, "element outside mode range");
        let mut t = ComplexMatrix::identity(m, m);
        let b = self.matrix2();
        let p = self.mode_lo;
        t[(p, p)] = b[(0, 0)];
        t[(p, p + 1)] = b[(0, 1)];
        t[(p + 1, p)] = b[(1, 0)];
        t[(p + 1, p + 1)] = b[(1, 1)];
        t
    }
}

/// Result of [`decompose`]: beamsplitters in application order plus the
/// residual output phases.
#[derive(Debug, Clone, PartialEq)]
pub struct ClementsDecomposition {
    pub m: usize,
    pub elements: Vec<BeamsplitterElement>,
    /// Residual diagonal D = diag(e^{iα₀}, …), applied after all elements.
    pub output_phases: Vec<f64>,
}

// Right multiplication by T⁻¹ on column pair (c, c+1); the inverse block is
// [[e^{-iφ}cosθ, e^{-iφ}sinθ], [−sinθ, cosθ]].
fn apply_right_tinv(w: &mut ComplexMatrix, c: usize, theta: f64, phi: f64) {
    let (s, co) = theta.sin_cos();
    let ph = Complex64::from_polar(1.0, -phi);
    for r in 0..w.nrows() {
        let x = w[(r, c)];
        let y = w[(r, c + 1)];
        w[(r, c)] = x * ph * co - y * s;
        w[(r, c + 1)] = x * ph * s + y * co;
    }
}

// Left multiplication by T on row pair (lo, lo+1).
fn apply_left_t(w: &mut ComplexMatrix, lo: usize, theta: f64, phi: f64) {
    let (s, co) = theta.sin_cos();
    let ph = Complex64::from_polar(1.0, phi);
    for c in 0..w.ncols() {
        let x = w[(lo, c)];
        let y = w[(lo + 1, c)];
        w[(lo, c)] = ph * co * x - s * y;
        w[(lo + 1, c)] = ph * s * x + co * y;
    }
}

/// Factors the interferometer into at most m(m−1)/2 adjacent-mode
/// beamsplitters and m output phases such that
/// [`reconstruct`] reproduces the input within 1e−10.
pub fn decompose(spec: &InterferometerSpec) -> ClementsDecomposition {
    let m = spec.modes();
    let mut w = spec.matrix().clone();

    // (mode_lo, theta, phi) of the recorded sweep operations.
    let mut right_ops: Vec<(usize, f64, f64)> = Vec::new();
    let mut left_ops: Vec<(usize, f64, f64)> = Vec::new();

    for step in 1..m {
        if step % 2 == 1 {
            // Column sweep: null (m−1−j, step−1−j) using columns
            // (step−1−j, step−j), walking from the diagonal to the corner.
            for j in 0..step {
                let r = m - 1 - j;
                let c = step - 1 - j;
                let a = w[(r, c)];
                let b = w[(r, c + 1)];
                let theta = a.norm().atan2(b.norm());
                let phi = wrap_tau(a.arg() - b.arg());
                apply_right_tinv(&mut w, c, theta, phi);
                right_ops.push((c, theta, phi));
            }
        } else {
            // Row sweep: null (m+j−step−1, j−1) using rows one above.
            for j in 1..=step {
                let r = m + j - step - 1;
                let c = j - 1;
                let a = w[(r, c)];
                let above = w[(r - 1, c)];
                let theta = a.norm().atan2(above.norm());
                let phi = wrap_tau(a.arg() - above.arg() + PI);
                apply_left_t(&mut w, r - 1, theta, phi);
                left_ops.push((r - 1, theta, phi));
            }
        }
    }

    // W is now diagonal: L_q···L_1 U R_1···R_p = D, so
    // U = T⁻¹_{L1}···T⁻¹_{Lq} · D · T_{Rp}···T_{R1}.
    let mut alpha: Vec<f64> = (0..m).map(|p| w[(p, p)].arg()).collect();

    // Commute each left factor through the diagonal, innermost first:
    // T⁻¹(θ,φ) · diag(e^{iα}, e^{iβ}) = diag(e^{i(β−φ+π)}, e^{iβ}) · T(θ, α−β+π).
    let mut pushed_left: Vec<(usize, f64, f64)> = Vec::with_capacity(left_ops.len());
    for &(lo, theta, phi) in left_ops.iter().rev() {
        let a = alpha[lo];
        let b = alpha[lo + 1];
        pushed_left.push((lo, theta, wrap_tau(a - b + PI)));
        alpha[lo] = b - phi + PI;
    }

    // Application order: the column-sweep daggers in recording order, then
    // the commuted row-sweep factors (already innermost-first), then D.
    let mut elements = Vec::with_capacity(right_ops.len() + pushed_left.len());
    for &(lo, theta, phi) in right_ops.iter().chain(pushed_left.iter()) {
        elements.push(BeamsplitterElement {
            mode_lo: lo,
            theta,
            phi,
            position: elements.len(),
        });
    }

    ClementsDecomposition {
        m,
        elements,
        output_phases: alpha.into_iter().map(wrap_tau).collect(),
    }
}

/// Multiplies the decomposition back together: D · T_K ··· T_1.
pub fn reconstruct(d: &ClementsDecomposition) -> ComplexMatrix {
    let m = d.m;
    let mut acc = ComplexMatrix::identity(m, m);
    for e in &d.elements {
        apply_left_t(&mut acc, e.mode_lo, e.theta, e.phi);
    }
    for (p, &phase) in d.output_phases.iter().enumerate() {
        let ph = Complex64::from_polar(1.0, phase);
        for c in 0..m {
            acc[(p, c)] *= ph;
        }
    }
    acc
}
