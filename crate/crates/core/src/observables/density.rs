use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest `|rho - rho^dagger|` entry accepted.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
/// Largest `|tr rho - 1|` accepted.
pub const TRACE_TOLERANCE: f64 = 1e-9;
/// Eigenvalues at or below this contribute nothing to the entropy.
pub const EIGENVALUE_CLAMP: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Subsystem {
    Position,
    Color,
    /// Position and color together (the walker's arc).
    Particle,
    Spin,
}

impl fmt::Display for Subsystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Subsystem::Position => "position",
            Subsystem::Color => "color",
            Subsystem::Particle => "particle",
            Subsystem::Spin => "spin",
        };
        f.write_str(name)
    }
}

/// Reduced density matrix of one subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: DMatrix<Complex64>,
    label: Subsystem,
}

impl DensityMatrix {
    pub fn new(matrix: DMatrix<Complex64>, label: Subsystem) -> Self {
        DensityMatrix { matrix, label }
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn label(&self) -> Subsystem {
        self.label
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Checks Hermiticity and unit trace.
    pub fn validate(&self) -> Result<()> {
        if !self.matrix.is_square() {
            return Err(Error::InvalidDensity(format!("{} matrix is not square", self.label)));
        }
        let herm = self.hermiticity_error();
        if herm > HERMITIAN_TOLERANCE {
            return Err(Error::InvalidDensity(format!(
                "{} matrix deviates from Hermitian by {herm:e}",
                self.label
            )));
        }
        let trace = self.trace();
        if (trace - 1.0).norm() > TRACE_TOLERANCE {
            return Err(Error::InvalidDensity(format!(
                "{} matrix has trace {trace} instead of 1",
                self.label
            )));
        }
        Ok(())
    }

    /// Ascending eigenvalues of the Hermitian matrix.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut values: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        values.sort_by(f64::total_cmp);
        values
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> Result<f64> {
        von_neumann_entropy(self)
    }
}

/// Entropy of a spectrum in bits, `0 log 0 = 0` below the clamp.
pub fn spectrum_entropy(eigenvalues: &[f64]) -> f64 {
    let s: f64 = eigenvalues
        .iter()
        .filter(|&&l| l > EIGENVALUE_CLAMP)
        .map(|&l| -l * l.log2())
        .sum();
    // A pure state can leave a -0.0 or a tiny negative rounding residue.
    s.max(0.0)
}

/// `-tr rho log2 rho` after validating the input.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    rho.validate()?;
    Ok(spectrum_entropy(&rho.eigenvalues()))
}
