//! Hermitian and density operators with validated invariants.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::matrix::ComplexMatrix;

/// Entrywise tolerance for accepting a matrix as Hermitian.
pub const TOL_HERM: f64 = 1e-10;

/// Asymmetry beyond this is an error rather than drift; anything below is
/// symmetrized away before spectral work.
pub const TOL_ASYMMETRY: f64 = 1e-8;

/// Eigenvalue floor for density operators.
pub const TOL_PSD: f64 = 1e-10;

/// A square complex matrix equal to its own conjugate transpose.
///
/// Construction symmetrizes the input as (H + H†)/2 so downstream spectral
/// routines always see an exactly Hermitian matrix; inputs with asymmetry
/// beyond [`TOL_ASYMMETRY`] are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::shape(format!(
                "Hermitian operator must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let asymmetry = matrix.asymmetry();
        if asymmetry > TOL_ASYMMETRY {
            return Err(Error::NotHermitian { asymmetry });
        }
        Ok(Self {
            matrix: matrix.symmetrize(),
        })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim),
        }
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        Self {
            matrix: ComplexMatrix::from_real_diag(diag),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Real trace (the imaginary part of a Hermitian trace is zero).
    pub fn trace_re(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Real Hilbert-Schmidt inner product ⟨A,B⟩ between Hermitian operators.
    pub fn inner(&self, other: &Self) -> f64 {
        self.matrix.hs_inner(&other.matrix).re
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix - &other.matrix,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            matrix: self.matrix.scale_re(s),
        }
    }

    /// Tensor product of Hermitian operators (left factor slow).
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            matrix: self.matrix.tensor(&other.matrix),
        }
    }
}

impl TryFrom<ComplexMatrix> for HermitianOperator {
    type Error = Error;
    fn try_from(m: ComplexMatrix) -> Result<Self> {
        Self::new(m)
    }
}

impl From<HermitianOperator> for ComplexMatrix {
    fn from(h: HermitianOperator) -> ComplexMatrix {
        h.matrix
    }
}

/// Unit-trace positive semidefinite operator: a mixed quantum state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct DensityOperator {
    op: HermitianOperator,
}

impl DensityOperator {
    /// Validate trace = 1 (within 1e-10) and eigenvalues ≥ -1e-10.
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let tr = op.trace_re();
        if (tr - 1.0).abs() > TOL_PSD {
            return Err(Error::NotDensity {
                context: format!("trace {tr} is not 1"),
            });
        }
        let spec = op.eig()?;
        let min = spec.eigenvalues().first().copied().unwrap_or(0.0);
        if min < -TOL_PSD {
            return Err(Error::NotDensity {
                context: format!("smallest eigenvalue {min:.3e} is negative"),
            });
        }
        Ok(Self { op })
    }

    /// Construction path for operators that are density matrices by build
    /// (simplex projections, channel outputs). Invariants are debug-checked.
    pub(crate) fn new_unchecked(op: HermitianOperator) -> Self {
        debug_assert!((op.trace_re() - 1.0).abs() < 1e-8);
        Self { op }
    }

    /// Maximally mixed state I/d.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            op: HermitianOperator::identity(dim).scale(1.0 / dim as f64),
        }
    }

    /// Pure state |ψ⟩⟨ψ| from an amplitude vector (normalized internally).
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::NotDensity {
                context: "zero amplitude vector".into(),
            });
        }
        let normed: Vec<Complex64> = amplitudes.iter().map(|z| z / norm).collect();
        let op = HermitianOperator::new(ComplexMatrix::outer(&normed, &normed))?;
        Ok(Self { op })
    }

    /// Computational basis state |index⟩⟨index|.
    pub fn basis_state(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidParam(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Self::pure(&amps)
    }

    /// Classical state diag(p) from a probability vector.
    pub fn from_probabilities(probs: &[f64]) -> Result<Self> {
        let sum: f64 = probs.iter().sum();
        if probs.iter().any(|&p| p < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::NotDensity {
                context: format!("probabilities must be nonnegative and sum to 1, got sum {sum}"),
            });
        }
        Ok(Self {
            op: HermitianOperator::from_real_diag(probs),
        })
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.op.matrix()
    }

    /// Product state ρ ⊗ ξ.
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            op: self.op.tensor(&other.op),
        }
    }
}

impl TryFrom<ComplexMatrix> for DensityOperator {
    type Error = Error;
    fn try_from(m: ComplexMatrix) -> Result<Self> {
        Self::new(HermitianOperator::new(m)?)
    }
}

impl From<DensityOperator> for ComplexMatrix {
    fn from(d: DensityOperator) -> ComplexMatrix {
        d.op.into_matrix()
    }
}
