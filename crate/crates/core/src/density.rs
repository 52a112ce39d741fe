use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigensystem_with, ComplexMatrix, Tolerances};

/// A physical quantum state: Hermitian, unit trace, positive semidefinite.
///
/// The invariants are checked once at construction; afterwards the value is
/// immutable.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerances(matrix, &Tolerances::default())
    }

    pub fn with_tolerances(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        if !matrix.is_finite() {
            return Err(Error::NonFinite);
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > tol.hermitian {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > tol.trace {
            return Err(Error::BadTrace { trace });
        }
        let sys = hermitian_eigensystem_with(&matrix, tol)?;
        let min_eigenvalue = sys.values.last().copied().unwrap_or(0.0);
        if min_eigenvalue < -tol.psd_floor {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self {
            matrix: matrix.hermitian_part(),
        })
    }

    /// Normalizes a Hermitian PSD matrix by its trace before validating.
    pub fn from_unnormalized(matrix: ComplexMatrix) -> Result<Self> {
        let trace = matrix.trace().re;
        if !(trace.is_finite() && trace > 0.0) {
            return Err(Error::BadTrace { trace });
        }
        Self::new(matrix.scale_real(1.0 / trace))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }

    /// Bloch vector (⟨σx⟩, ⟨σy⟩, ⟨σz⟩) of a qubit state.
    pub fn bloch_vector(&self) -> Result<[f64; 3]> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: self.dim(),
            });
        }
        let m = &self.matrix;
        Ok([
            2.0 * m[(0, 1)].re,
            -2.0 * m[(0, 1)].im,
            (m[(0, 0)] - m[(1, 1)]).re,
        ])
    }
}

impl AsRef<ComplexMatrix> for DensityMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.matrix
    }
}
