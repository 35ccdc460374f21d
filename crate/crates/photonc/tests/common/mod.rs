//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use photonc::linalg::ComplexMatrix;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Symmetric beamsplitter convention used for the closed-form reference:
/// [[cosθ, e^{iφ} sinθ], [−e^{−iφ} sinθ, cosθ]]. Its generator is a pure
/// hopping Hamiltonian, which keeps the hand-derived lift simple.
pub fn simple_beamsplitter(theta: f64, phi: f64) -> ComplexMatrix {
    let (s, ct) = theta.sin_cos();
    let e = Complex64::new(0.0, phi).exp();
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(0, 0)] = c(ct, 0.0);
    m[(0, 1)] = e * s;
    m[(1, 0)] = -e.conj() * s;
    m[(1, 1)] = c(ct, 0.0);
    m
}

/// Closed-form two-mode truncated unitary of [`simple_beamsplitter`] at
/// photon cutoff 2 (three levels per mode). Basis index is s₀ + 3·s₁ with
/// mode 0 fastest, matching the pipeline's encoding.
///
/// Sector structure: the photon total is conserved, singles rotate by θ,
/// doubles pick up the √2 bosonic enhancement, and the Σ = 3 pair
/// {(2,1),(1,2)} rotates by 2θ because its third companions (3,0)/(0,3) are
/// cut; (2,2) is frozen entirely.
pub fn reference_two_mode_n2(theta: f64, phi: f64) -> ComplexMatrix {
    let ct = theta.cos();
    let s = theta.sin();
    let c2 = (2.0 * theta).cos();
    let s2 = (2.0 * theta).sin();
    let r2 = std::f64::consts::SQRT_2;
    let e = |k: f64| Complex64::new(0.0, k * phi).exp();
    let mut m = ComplexMatrix::zeros(9, 9);
    m[(0, 0)] = Complex64::ONE;

    m[(1, 1)] = c(ct, 0.0);
    m[(1, 3)] = e(1.0) * s;
    m[(3, 1)] = -e(-1.0) * s;
    m[(3, 3)] = c(ct, 0.0);

    m[(2, 2)] = c(ct * ct, 0.0);
    m[(2, 4)] = e(1.0) * (r2 * ct * s);
    m[(2, 6)] = e(2.0) * (s * s);
    m[(4, 2)] = -e(-1.0) * (r2 * ct * s);
    m[(4, 4)] = c(c2, 0.0);
    m[(4, 6)] = e(1.0) * (r2 * ct * s);
    m[(6, 2)] = e(-2.0) * (s * s);
    m[(6, 4)] = -e(-1.0) * (r2 * ct * s);
    m[(6, 6)] = c(ct * ct, 0.0);

    m[(5, 5)] = c(c2, 0.0);
    m[(5, 7)] = e(1.0) * s2;
    m[(7, 5)] = -e(-1.0) * s2;
    m[(7, 7)] = c(c2, 0.0);

    m[(8, 8)] = Complex64::ONE;
    m
}

/// Deterministic (θ, φ) grid for the golden tests: low-discrepancy points
/// covering θ ∈ [0, π/2], φ ∈ [0, 2π], plus the boundary cases.
pub fn angle_samples(count: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(count);
    out.push((0.0, 0.0));
    out.push((std::f64::consts::FRAC_PI_2, 0.0));
    out.push((std::f64::consts::FRAC_PI_4, std::f64::consts::PI));
    let golden = 0.618_033_988_749_894_9_f64;
    let mut x = 0.37;
    let mut y = 0.71;
    while out.len() < count {
        x = (x + golden) % 1.0;
        y = (y + golden * golden) % 1.0;
        out.push((x * std::f64::consts::FRAC_PI_2, y * std::f64::consts::TAU));
    }
    out
}
