//! Cosine-sine decomposition of an even-dimensional unitary.
//!
//! Splits U (2h × 2h) as
//!
//!   U = diag(V1, V2) · [[C, −S], [S, C]] · diag(W1, W2)†
//!
//! with V1, V2, W1, W2 unitary (h × h) and C = diag(cos θ_i),
//! S = diag(sin θ_i), θ_i ∈ [0, π/2].
//!
//! The principal-angle pairs are read off the eigenstructure of
//! G = J·U†·J·U with J = diag(I, −I). In the decomposed basis G acts as a
//! planar rotation by 2θ_i on the span of the i-th columns of W1 and W2, so
//! its eigenvalues are e^{±2iθ_i} and the eigenvector for e^{+2iθ} is
//! (w1 − i·w2)/√2 with w1 supported on the top half and w2 on the bottom.
//! The left factors follow by rotating the images U·w1, U·w2 back by θ.
//! Every step reads full-length vector norms, so angles at or near 0 and
//! π/2 cost no accuracy: there are no small divisors anywhere.

use crate::linalg::{unitary_eigen, ComplexMatrix};
use crate::{Error, Result};
use nalgebra::DVector;
use num_complex::Complex64;

pub(crate) struct CosineSine {
    pub v1: ComplexMatrix,
    pub v2: ComplexMatrix,
    /// Principal angles, ascending, in [0, π/2].
    pub theta: Vec<f64>,
    pub w1: ComplexMatrix,
    pub w2: ComplexMatrix,
}

/// Eigenphases within this distance of 0 (or of ±π) are treated as exact
/// rotation angles 0 (or π/2). Matches the clustering gap of the underlying
/// eigensolver so a near-degenerate pair is never split across classes.
const PHASE_GAP: f64 = 1e-7;

fn column(m: &ComplexMatrix, j: usize) -> DVector<Complex64> {
    DVector::from_iterator(m.nrows(), m.column(j).iter().cloned())
}

fn top_half(v: &DVector<Complex64>, h: usize) -> DVector<Complex64> {
    DVector::from_iterator(h, v.iter().take(h).cloned())
}

fn bottom_half(v: &DVector<Complex64>, h: usize) -> DVector<Complex64> {
    DVector::from_iterator(h, v.iter().skip(h).cloned())
}

fn normalized(v: DVector<Complex64>) -> DVector<Complex64> {
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

/// One (w1, w2) pairing extracted from the eigenstructure. The rotation
/// angle is re-measured later from the images of these vectors.
struct PrincipalPair {
    w1: DVector<Complex64>,
    w2: DVector<Complex64>,
}

/// Split a degenerate eigenspace of G (phase 0 or ±π) into top-supported and
/// bottom-supported orthonormal vectors and pair them up plane by plane.
///
/// In such a space G preserves the top/bottom split, so the projector onto
/// the top half restricted to the space has eigenvalues clustered at 0 and 1
/// and its eigenvectors separate the halves. That leaves the pairing between
/// top and bottom directions undetermined; it is recovered from the residual
/// coupling the full matrix U induces between them (the cross-half parts of
/// the images U·w1 and U·w2), whose singular vectors rotate both families
/// into matched planes. With exactly extreme angles the coupling vanishes
/// and any pairing is valid.
fn split_axis_aligned_space(
    u: &ComplexMatrix,
    basis: &ComplexMatrix,
    indices: &[usize],
    h: usize,
    near_zero: bool,
) -> Result<Vec<PrincipalPair>> {
    let k = indices.len();
    // Gram matrix of the top projector in the eigenspace basis.
    let mut gram = ComplexMatrix::zeros(k, k);
    for (a, &ia) in indices.iter().enumerate() {
        for (b, &ib) in indices.iter().enumerate() {
            let mut acc = Complex64::ZERO;
            for r in 0..h {
                acc += basis[(r, ia)].conj() * basis[(r, ib)];
            }
            gram[(a, b)] = acc;
        }
    }
    let gram = (gram.clone() + gram.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = gram.symmetric_eigen();

    let mut tops: Vec<DVector<Complex64>> = Vec::new();
    let mut bottoms: Vec<DVector<Complex64>> = Vec::new();
    for j in 0..k {
        let mut vec = DVector::from_element(2 * h, Complex64::ZERO);
        for (a, &ia) in indices.iter().enumerate() {
            let coeff = eig.eigenvectors[(a, j)];
            for r in 0..2 * h {
                vec[r] += basis[(r, ia)] * coeff;
            }
        }
        if eig.eigenvalues[j] > 0.5 {
            tops.push(normalized(top_half(&vec, h)));
        } else {
            bottoms.push(normalized(bottom_half(&vec, h)));
        }
    }
    if tops.len() != bottoms.len() {
        return Err(Error::Validation(format!(
            "cosine-sine split: axis-aligned eigenspace divided into {} top and {} bottom \
             directions; the input is too far from unitary",
            tops.len(),
            bottoms.len()
        )));
    }
    let z = tops.len();

    // Images under U, restricted to the half opposite the class: for θ ≈ 0
    // the coupling lives in the bottom halves, for θ ≈ π/2 in the top halves
    // (with a sign flip from the −sin block). This runs even for a single
    // pair: the halves carry independent eigenvector phases, and an angle
    // merely near the extreme leaks the mismatch into the reconstruction at
    // first order, so the 1×1 "SVD" must still align them.
    let mut coupled_y = Vec::with_capacity(z);
    let mut coupled_z = Vec::with_capacity(z);
    for i in 0..z {
        let mut y = DVector::from_element(2 * h, Complex64::ZERO);
        let mut zz = DVector::from_element(2 * h, Complex64::ZERO);
        for r in 0..2 * h {
            let mut acc_y = Complex64::ZERO;
            let mut acc_z = Complex64::ZERO;
            for c in 0..h {
                acc_y += u[(r, c)] * tops[i][c];
                acc_z += u[(r, c + h)] * bottoms[i][c];
            }
            y[r] = acc_y;
            zz[r] = acc_z;
        }
        if near_zero {
            coupled_y.push(bottom_half(&y, h));
            coupled_z.push(bottom_half(&zz, h));
        } else {
            coupled_y.push(top_half(&y, h));
            coupled_z.push(top_half(&zz, h));
        }
    }
    let mut coupling = ComplexMatrix::zeros(z, z);
    for i in 0..z {
        for j in 0..z {
            let mut acc = Complex64::ZERO;
            for r in 0..h {
                acc += coupled_y[i][r].conj() * coupled_z[j][r];
            }
            coupling[(i, j)] = if near_zero { acc } else { -acc };
        }
    }
    let svd = coupling.svd(true, true);
    let p = svd.u.as_ref().expect("svd with u");
    let q_t = svd.v_t.as_ref().expect("svd with v_t");

    let mut pairs = Vec::with_capacity(z);
    for j in 0..z {
        let mut w1 = DVector::from_element(h, Complex64::ZERO);
        let mut w2 = DVector::from_element(h, Complex64::ZERO);
        for i in 0..z {
            let cp = p[(i, j)];
            let cq = q_t[(j, i)].conj();
            for r in 0..h {
                w1[r] += tops[i][r] * cp;
                w2[r] += bottoms[i][r] * cq;
            }
        }
        pairs.push(PrincipalPair {
            w1: normalized(w1),
            w2: normalized(w2),
        });
    }
    Ok(pairs)
}

pub(crate) fn cosine_sine(u: &ComplexMatrix) -> Result<CosineSine> {
    let n = u.nrows();
    if n != u.ncols() || !n.is_multiple_of(2) || n == 0 {
        return Err(Error::Dimension(format!(
            "cosine-sine decomposition needs an even square matrix, got {}x{}",
            n,
            u.ncols()
        )));
    }
    let h = n / 2;

    // G = J·U†·J·U, with the J factors applied as sign flips.
    let mut g = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        let si = if i < h { 1.0 } else { -1.0 };
        for j in 0..n {
            let sj = if j < h { 1.0 } else { -1.0 };
            g[(i, j)] = u[(j, i)].conj() * (si * sj);
        }
    }
    let g = g * u;
    let (basis, phases) = unitary_eigen(&g)?;

    // Classify eigenphases ω: ω ≈ 0 → θ = 0 plane, |ω| ≈ π → θ = π/2 plane,
    // ω ∈ (0, π) → rotation pair with θ = ω/2 (negative ω are the conjugate
    // copies and carry no new information).
    let mut zero_idx = Vec::new();
    let mut pi_idx = Vec::new();
    let mut rotation_idx = Vec::new();
    for (i, &omega) in phases.iter().enumerate() {
        if omega.abs() <= PHASE_GAP {
            zero_idx.push(i);
        } else if omega.abs() >= std::f64::consts::PI - PHASE_GAP {
            pi_idx.push(i);
        } else if omega > 0.0 {
            rotation_idx.push(i);
        }
    }

    let mut pairs: Vec<PrincipalPair> = Vec::with_capacity(h);
    if !zero_idx.is_empty() {
        pairs.extend(split_axis_aligned_space(u, &basis, &zero_idx, h, true)?);
    }
    if !pi_idx.is_empty() {
        pairs.extend(split_axis_aligned_space(u, &basis, &pi_idx, h, false)?);
    }
    for &i in &rotation_idx {
        let v = column(&basis, i);
        // v = (w1 − i·w2)/√2 up to one shared phase; the shared phase is a
        // valid gauge on the pair, so it is absorbed into w1 and w2 jointly.
        let w1 = normalized(top_half(&v, h));
        let w2 = normalized(bottom_half(&v, h) * Complex64::new(0.0, 1.0));
        pairs.push(PrincipalPair { w1, w2 });
    }

    if pairs.len() != h {
        return Err(Error::Validation(format!(
            "cosine-sine decomposition produced {} principal pairs, expected {}",
            pairs.len(),
            h
        )));
    }

    struct ResolvedPair {
        theta: f64,
        v1: DVector<Complex64>,
        v2: DVector<Complex64>,
        w1: DVector<Complex64>,
        w2: DVector<Complex64>,
    }
    let mut resolved = Vec::with_capacity(h);

    for pair in &pairs {
        // Images of the padded right vectors: y = U(w1 ⊕ 0) = c·v1 ⊕ s·v2,
        // z = U(0 ⊕ w2) = −s·v1 ⊕ c·v2.
        let mut y = DVector::from_element(n, Complex64::ZERO);
        let mut z = DVector::from_element(n, Complex64::ZERO);
        for r in 0..n {
            let mut acc_y = Complex64::ZERO;
            let mut acc_z = Complex64::ZERO;
            for k in 0..h {
                acc_y += u[(r, k)] * pair.w1[k];
                acc_z += u[(r, k + h)] * pair.w2[k];
            }
            y[r] = acc_y;
            z[r] = acc_z;
        }
        // Cosine and sine from full-vector norms, averaged over the two
        // independent reads, then renormalized onto the unit circle. The
        // tabulated θ-class only guided the pairing; the angle itself is
        // re-measured here.
        let c_raw = (top_half(&y, h).norm() + bottom_half(&z, h).norm()) / 2.0;
        let s_raw = (bottom_half(&y, h).norm() + top_half(&z, h).norm()) / 2.0;
        let r = c_raw.hypot(s_raw);
        let (c, s) = (c_raw / r, s_raw / r);

        // Rotate the images back by θ: top(c·y − s·z) = v1, bottom(s·y + c·z) = v2,
        // both with unit norm by construction.
        let cc = Complex64::new(c, 0.0);
        let ss = Complex64::new(s, 0.0);
        resolved.push(ResolvedPair {
            theta: s.atan2(c),
            v1: normalized(top_half(&(&y * cc - &z * ss), h)),
            v2: normalized(bottom_half(&(&y * ss + &z * cc), h)),
            w1: pair.w1.clone(),
            w2: pair.w2.clone(),
        });
    }

    // Order by the measured angle, not the coarse class label, so vectors in
    // the same degenerate class still come out ascending.
    resolved.sort_by(|a, b| a.theta.total_cmp(&b.theta));

    let mut v1 = ComplexMatrix::zeros(h, h);
    let mut v2 = ComplexMatrix::zeros(h, h);
    let mut w1 = ComplexMatrix::zeros(h, h);
    let mut w2 = ComplexMatrix::zeros(h, h);
    let mut theta = Vec::with_capacity(h);
    for (col, pair) in resolved.iter().enumerate() {
        theta.push(pair.theta);
        for row in 0..h {
            v1[(row, col)] = pair.v1[row];
            v2[(row, col)] = pair.v2[row];
            w1[(row, col)] = pair.w1[row];
            w2[(row, col)] = pair.w2[row];
        }
    }

    Ok(CosineSine { v1, v2, theta, w1, w2 })
}

#[cfg(test)]
pub(crate) fn reconstruct(split: &CosineSine) -> ComplexMatrix {
    let h = split.theta.len();
    let mut rot = ComplexMatrix::zeros(2 * h, 2 * h);
    for i in 0..h {
        let (s, c) = split.theta[i].sin_cos();
        rot[(i, i)] = Complex64::new(c, 0.0);
        rot[(i, i + h)] = Complex64::new(-s, 0.0);
        rot[(i + h, i)] = Complex64::new(s, 0.0);
        rot[(i + h, i + h)] = Complex64::new(c, 0.0);
    }
    let mut left = ComplexMatrix::zeros(2 * h, 2 * h);
    let mut right = ComplexMatrix::zeros(2 * h, 2 * h);
    for r in 0..h {
        for c in 0..h {
            left[(r, c)] = split.v1[(r, c)];
            left[(r + h, c + h)] = split.v2[(r, c)];
            right[(r, c)] = split.w1[(r, c)];
            right[(r + h, c + h)] = split.w2[(r, c)];
        }
    }
    left * rot * right.adjoint()
}
