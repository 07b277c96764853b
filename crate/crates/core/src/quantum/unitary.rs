use nalgebra::DMatrix;

use super::linalg::{cmatmul, identity_deviation};
use super::PhotonDensity;
use crate::{Error, Result, C64, CHANNEL_TOL};

/// Unitary on the `M` photon modes. The vacuum mode is left untouched when
/// the operator acts on a [`PhotonDensity`].
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    matrix: DMatrix<C64>,
}

impl Unitary {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        if matrix.nrows() == 0 {
            return Err(Error::param("unitary", "empty matrix"));
        }
        let gram = cmatmul(&matrix.adjoint(), &matrix);
        let dev = identity_deviation(&gram);
        if dev.is_nan() || dev > CHANNEL_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Unitary { matrix })
    }

    pub(crate) fn new_unchecked(matrix: DMatrix<C64>) -> Self {
        Unitary { matrix }
    }

    pub fn identity(modes: usize) -> Self {
        Unitary { matrix: DMatrix::identity(modes, modes) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Unitary { matrix: self.matrix.adjoint() }
    }

    /// `self · other`, i.e. `other` acts first.
    pub fn compose(&self, other: &Unitary) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(Unitary { matrix: cmatmul(&self.matrix, &other.matrix) })
    }

    pub fn apply_to(&self, amplitudes: &[C64]) -> Result<Vec<C64>> {
        if amplitudes.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: amplitudes.len() });
        }
        Ok((0..self.dim())
            .map(|i| self.matrix.row(i).iter().zip(amplitudes).map(|(u, a)| u * a).sum())
            .collect())
    }
}

/// `rho -> U rho U†` on the photon modes.
pub fn apply_unitary(rho: &PhotonDensity, u: &Unitary) -> Result<PhotonDensity> {
    rho.apply_unitary(u)
}
