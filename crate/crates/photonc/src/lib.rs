//! Compiler from linear-optical interferometers to qubit circuits.
//!
//! An m-mode interferometer is described by an m×m unitary acting on the
//! mode creation operators. Given a photon budget n, this crate compiles
//! that description into a circuit over {CNOT, U3} Gates that reproduces
//! the interferometer's action on every Fock input with at most n photons,
//! then checks the compiled circuit against a permanent-based oracle.
//!
//! Pipeline: [`clements`] factors the unitary into adjacent-mode
//! beamsplitters, [`fock`] lifts each beamsplitter to a truncated
//! second-quantized unitary, [`synth`] turns those unitaries into gates,
//! [`circuit`] assembles the full register layout, and [`sim`] / [`oracle`]
//! provide the two independent ways of evaluating the result.

pub mod circuit;
pub mod clements;
pub mod fock;
pub mod linalg;
pub mod oracle;
pub mod sim;
pub mod synth;

pub mod cli;

mod par;

use thiserror::Error;

/// Unified error type for the compilation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// A validated m-mode interferometer: the m×m mode-transformation unitary.
///
/// Construction is the single validation point for the pipeline; everything
/// downstream may assume unitarity at [`linalg::UNITARITY_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct InterferometerSpec {
    matrix: linalg::ComplexMatrix,
}

impl InterferometerSpec {
    /// Validates squareness and unitarity, then wraps the matrix.
    pub fn new(matrix: linalg::ComplexMatrix) -> Result<Self> {
        let report = linalg::check_unitary(&matrix, linalg::UNITARITY_TOL)?;
        if !report.passed {
            return Err(Error::Validation(format!(
                "interferometer matrix deviates from unitarity by {:.3e} (tolerance {:.0e})",
                report.max_deviation,
                linalg::UNITARITY_TOL
            )));
        }
        Ok(Self { matrix })
    }

    /// Number of optical modes m.
    pub fn modes(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &linalg::ComplexMatrix {
        &self.matrix
    }
}
