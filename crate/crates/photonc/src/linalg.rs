//! Dense complex matrix helpers: unitarity checks, the matrix logarithm
//! and exponential used by the compilation pipeline, and Haar-random
//! unitary sampling for tests and benchmarks.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{Error, Result};

/// Dense complex matrix. Public constructors and accessors treat entries
/// as row-major regardless of the internal storage order.
pub type ComplexMatrix = DMatrix<Complex64>;

/// Deviation from unitarity accepted on ingested matrices.
pub const UNITARITY_TOL: f64 = 1e-10;
/// Deviation from Hermiticity accepted by the exponential.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Max entry error tolerated when a decomposition is re-multiplied.
pub const ROUND_TRIP_TOL: f64 = 1e-9;

/// Outcome of a unitarity check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitarityReport {
    /// max |(U†U − I)ᵢⱼ| over all entries.
    pub max_deviation: f64,
    /// Whether `max_deviation` is within the tolerance given to the check.
    pub passed: bool,
}

/// Builds a matrix from row-major entries.
pub fn mat_from_rows(rows: usize, cols: usize, entries: &[Complex64]) -> ComplexMatrix {
    DMatrix::from_row_slice(rows, cols, entries)
}

/// Largest |aᵢⱼ − bᵢⱼ| between two equally sized matrices.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Measures how far `m` is from unitary: max |(M†M − I)ᵢⱼ| against `tol`.
pub fn check_unitary(m: &ComplexMatrix, tol: f64) -> Result<UnitarityReport> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!(
            "unitarity check needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let gram = m.adjoint() * m;
    let n = m.nrows();
    let mut max_deviation = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { Complex64::ONE } else { Complex64::ZERO };
            max_deviation = max_deviation.max((gram[(i, j)] - target).norm());
        }
    }
    Ok(UnitarityReport {
        max_deviation,
        passed: max_deviation <= tol,
    })
}

/// Forces exact Hermitian symmetry: H ← (H + H†)/2.
fn hermitize(h: &mut ComplexMatrix) {
    let n = h.nrows();
    for i in 0..n {
        h[(i, i)] = Complex64::new(h[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let mean = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
            h[(i, j)] = mean;
            h[(j, i)] = mean.conj();
        }
    }
}

fn max_hermiticity_deviation(h: &ComplexMatrix) -> f64 {
    let n = h.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            dev = dev.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Eigendecomposition of a unitary matrix: returns an orthonormal eigenbasis
/// and the eigenphases, so that U = basis · diag(e^{iφ}) · basis†.
///
/// U is normal, so its real part A = (U+U†)/2 and imaginary part
/// B = (U−U†)/(2i) are commuting Hermitian matrices. A is diagonalized
/// first; inside each (near-)degenerate eigenspace of A the restriction of
/// B is diagonalized to resolve a common eigenbasis. Each joint eigenpair
/// (a, b) satisfies a² + b² = 1 and contributes the phase atan2(b, a),
/// which lies in (−π, π].
pub fn unitary_eigen(u: &ComplexMatrix) -> Result<(ComplexMatrix, Vec<f64>)> {
    let report = check_unitary(u, UNITARITY_TOL)?;
    if !report.passed {
        return Err(Error::Validation(format!(
            "eigendecomposition requires a unitary input, deviation {:.3e} exceeds {:.0e}",
            report.max_deviation, UNITARITY_TOL
        )));
    }
    let n = u.nrows();
    let i_c = Complex64::I;
    let a = (u + u.adjoint()).map(|z| z * 0.5);
    let b = (u - u.adjoint()).map(|z| z / (2.0 * i_c));

    let eig = a.clone().symmetric_eigen();
    // Sort the eigenbasis of A so degenerate eigenvalues sit in consecutive
    // columns; clusters are then contiguous runs.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &q| eig.eigenvalues[p].total_cmp(&eig.eigenvalues[q]));
    let mut basis = ComplexMatrix::zeros(n, n);
    let mut a_vals = vec![0.0f64; n];
    for (col, &src) in order.iter().enumerate() {
        basis.set_column(col, &eig.eigenvectors.column(src));
        a_vals[col] = eig.eigenvalues[src];
    }

    // Eigenvalues of A are cos(phase) in [−1, 1]; this gap is far above
    // eigensolver noise yet far below any genuine spectral separation that
    // matters downstream.
    const CLUSTER_GAP: f64 = 1e-7;
    let mut phases = vec![0.0f64; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && a_vals[end] - a_vals[end - 1] <= CLUSTER_GAP {
            end += 1;
        }
        let width = end - start;
        if width == 1 {
            let v = basis.column(start);
            let bval = (v.adjoint() * &b * v)[(0, 0)].re;
            phases[start] = principal_phase(a_vals[start], bval);
        } else {
            // Diagonalize B restricted to the cluster to split states that
            // share cos(phase) but differ in sin(phase).
            let sub = basis.columns(start, width);
            let mut b_sub = (sub.adjoint() * &b * sub).clone_owned();
            hermitize(&mut b_sub);
            let sub_eig = b_sub.symmetric_eigen();
            let rotated = sub * &sub_eig.eigenvectors;
            for k in 0..width {
                // The B rotation re-mixes the cluster, so the slot-sorted A
                // value may belong to a different vector; re-measure A on
                // each rotated column before pairing it with its B value.
                let col = rotated.column(k);
                let aval = (col.adjoint() * &a * col)[(0, 0)].re;
                basis.set_column(start + k, &col);
                phases[start + k] = principal_phase(aval, sub_eig.eigenvalues[k]);
            }
        }
        start = end;
    }
    Ok((basis, phases))
}

/// Principal matrix logarithm of a unitary, returned as the Hermitian
/// generator H = −i log U with eigenvalues in (−π, π]. The reassembled H
/// is explicitly Hermitized.
pub fn matrix_log_unitary(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (basis, phases) = unitary_eigen(u)?;
    let n = u.nrows();
    let diag = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        phases.iter().map(|&p| Complex64::new(p, 0.0)),
    ));
    let mut h = &basis * diag * basis.adjoint();
    hermitize(&mut h);
    Ok(h)
}

/// Simultaneous diagonalization of two commuting real symmetric matrices:
/// returns a real orthogonal basis P with PᵀAP and PᵀBP both diagonal,
/// plus the paired diagonals. Degenerate eigenvalues of A are resolved by
/// diagonalizing B inside each cluster.
pub fn commuting_symmetric_eigen(
    a: &nalgebra::DMatrix<f64>,
    b: &nalgebra::DMatrix<f64>,
) -> (nalgebra::DMatrix<f64>, Vec<f64>, Vec<f64>) {
    let n = a.nrows();
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    let eig = a.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &q| eig.eigenvalues[p].total_cmp(&eig.eigenvalues[q]));
    let mut basis = nalgebra::DMatrix::<f64>::zeros(n, n);
    let mut a_vals = vec![0.0f64; n];
    for (col, &src) in order.iter().enumerate() {
        basis.set_column(col, &eig.eigenvectors.column(src));
        a_vals[col] = eig.eigenvalues[src];
    }

    let scale = a_vals.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let gap = 1e-7 * scale;
    let mut b_vals = vec![0.0f64; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && a_vals[end] - a_vals[end - 1] <= gap {
            end += 1;
        }
        let width = end - start;
        if width == 1 {
            let v = basis.column(start);
            b_vals[start] = (v.transpose() * b * v)[(0, 0)];
        } else {
            let sub = basis.columns(start, width);
            let mut b_sub = (sub.transpose() * b * sub).clone_owned();
            // Scrub asymmetry before the symmetric solver.
            b_sub = (&b_sub + b_sub.transpose()) * 0.5;
            let sub_eig = b_sub.symmetric_eigen();
            let rotated = sub * &sub_eig.eigenvectors;
            for k in 0..width {
                // Same re-measure as above: the slot-sorted A value may not
                // belong to the rotated vector it shares an index with.
                let col = rotated.column(k);
                let aval = (col.transpose() * a * col)[(0, 0)];
                basis.set_column(start + k, &col);
                a_vals[start + k] = aval;
                b_vals[start + k] = sub_eig.eigenvalues[k];
            }
        }
        start = end;
    }
    (basis, a_vals, b_vals)
}

/// Nearest unitary in Frobenius norm: the polar factor W·V† from the
/// singular value decomposition M = W·Σ·V†.
pub fn nearest_unitary(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!(
            "polar projection needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let svd = m.clone().svd(true, true);
    let w = svd.u.ok_or_else(|| Error::Validation("SVD failed to produce U".into()))?;
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Validation("SVD failed to produce V^T".into()))?;
    Ok(w * v_t)
}

// atan2 lands in [−π, π]; fold the closed lower endpoint onto π so the
// spectrum stays in (−π, π].
fn principal_phase(a: f64, b: f64) -> f64 {
    let p = b.atan2(a);
    if p <= -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        p
    }
}

/// exp(scale·H) for Hermitian H, via eigendecomposition. With scale = i
/// this produces the unitary generated by H.
pub fn matrix_exp_hermitian(h: &ComplexMatrix, scale: Complex64) -> Result<ComplexMatrix> {
    if h.nrows() != h.ncols() {
        return Err(Error::Dimension(format!(
            "matrix exponential needs a square matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    let dev = max_hermiticity_deviation(h);
    if dev > HERMITICITY_TOL {
        return Err(Error::Validation(format!(
            "matrix exponential requires a Hermitian input, deviation {:.3e} exceeds {:.0e}",
            dev, HERMITICITY_TOL
        )));
    }
    let mut hh = h.clone();
    hermitize(&mut hh);
    let eig = hh.symmetric_eigen();
    let n = h.nrows();
    let diag = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        eig.eigenvalues.iter().map(|&l| (scale * l).exp()),
    ));
    Ok(&eig.eigenvectors * diag * eig.eigenvectors.adjoint())
}

/// Haar-distributed random m×m unitary, deterministic per seed: QR of a
/// complex Ginibre matrix with the R diagonal phased away.
pub fn haar_random_unitary(m: usize, seed: u64) -> Result<ComplexMatrix> {
    if m == 0 {
        return Err(Error::Dimension(
            "haar_random_unitary needs m >= 1".to_string(),
        ));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    // Draw row-major so the stream order is part of the function's contract.
    let mut entries = Vec::with_capacity(m * m);
    for _ in 0..m * m {
        let re: f64 = normal.sample(&mut rng);
        let im: f64 = normal.sample(&mut rng);
        entries.push(Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2);
    }
    let g = mat_from_rows(m, m, &entries);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    // Multiplying column j by conj(phase(r_jj)) fixes the gauge so the
    // distribution is exactly Haar rather than QR-convention dependent.
    for j in 0..m {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::ONE };
        let correction = phase.conj();
        for i in 0..m {
            q[(i, j)] *= correction;
        }
    }
    Ok(q)
}
