use serde::{Deserialize, Serialize};

use crate::eigen::min_eigenvalue;
use crate::error::{Error, Result};
use crate::tensor::{ComplexMatrix, C64};
use crate::tolerance;

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DensityOperator {
    mat: ComplexMatrix,
}

impl DensityOperator {
    /// Validates hermiticity, unit trace and positivity at
    /// [`tolerance::STRUCTURAL`].
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let defect = mat.hermiticity_defect();
        if defect > tolerance::STRUCTURAL {
            return Err(Error::NotHermitian(defect));
        }
        let tr = mat.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tolerance::STRUCTURAL {
            return Err(Error::InvalidTrace(tr.re));
        }
        let lo = min_eigenvalue(&mat)?;
        if lo < -tolerance::STRUCTURAL {
            return Err(Error::NotPositive(lo));
        }
        Ok(Self { mat })
    }

    /// Normalizes a positive matrix by its trace before validating.
    pub fn normalized(mat: ComplexMatrix) -> Result<Self> {
        let tr = mat.trace().re;
        if tr <= 0.0 {
            return Err(Error::InvalidTrace(tr));
        }
        Self::new(mat.scale(1.0 / tr))
    }

    /// `|ψ⟩⟨ψ|` for a normalized ket.
    pub fn pure(ket: &[C64], dims: &[usize]) -> Result<Self> {
        let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > tolerance::STRUCTURAL {
            return Err(Error::InvalidTrace(norm));
        }
        Ok(Self {
            mat: ComplexMatrix::projector(ket, dims)?,
        })
    }

    pub fn maximally_mixed(dims: &[usize]) -> Result<Self> {
        let id = ComplexMatrix::identity(dims)?;
        let n = id.side() as f64;
        Ok(Self {
            mat: id.scale(1.0 / n),
        })
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn dims(&self) -> &[usize] {
        self.mat.dims()
    }

    pub fn side(&self) -> usize {
        self.mat.side()
    }

    /// `tr[ρ X]`, real part (exact for Hermitian `X`).
    pub fn expectation(&self, x: &ComplexMatrix) -> Result<f64> {
        Ok(self.mat.trace_product(x)?.re)
    }
}

impl<'de> Deserialize<'de> for DensityOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let mat = ComplexMatrix::deserialize(d)?;
        DensityOperator::new(mat).map_err(serde::de::Error::custom)
    }
}
