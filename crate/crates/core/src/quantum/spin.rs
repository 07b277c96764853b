use nalgebra::{Matrix2, Matrix4, Vector4};

use super::Purity;
use crate::{Error, Result, C64, PURE_TOL};

const NEGATIVITY_TOL: f64 = 1e-10;

/// Two-qubit spin density operator in the basis `↑↑, ↑↓, ↓↑, ↓↓`
/// (first qubit most significant).
#[derive(Debug, Clone, PartialEq)]
pub struct SpinDensity {
    matrix: Matrix4<C64>,
}

impl SpinDensity {
    pub fn from_matrix(matrix: Matrix4<C64>) -> Result<Self> {
        let mut dev: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                dev = dev.max((matrix[(i, j)] - matrix[(j, i)].conj()).norm());
            }
        }
        if dev > PURE_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (deviation {dev:e})")));
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > PURE_TOL {
            return Err(Error::InvalidDensity(format!("trace {trace} != 1")));
        }
        let herm = (matrix + matrix.adjoint()) * C64::new(0.5, 0.0);
        let eig = herm.symmetric_eigen();
        let min = eig.eigenvalues.min();
        if min < -NEGATIVITY_TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        if min >= 0.0 {
            return Ok(SpinDensity { matrix: herm });
        }
        let clipped = eig.eigenvalues.map(|l| l.max(0.0));
        let total = clipped.sum();
        let d = Matrix4::from_diagonal(&clipped.map(|l| C64::new(l / total, 0.0)));
        let v = eig.eigenvectors;
        Ok(SpinDensity { matrix: v * d * v.adjoint() })
    }

    /// `|ψ⟩⟨ψ|`; `amplitudes` are renormalized.
    pub fn pure(amplitudes: [C64; 4]) -> Result<Self> {
        let v = Vector4::from(amplitudes);
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm * norm));
        }
        let v = v / C64::new(norm, 0.0);
        Self::from_matrix(v * v.adjoint())
    }

    /// `ρ₁ ⊗ ρ₂` from two single-qubit Bloch vectors (length ≤ 1).
    pub fn product(bloch1: [f64; 3], bloch2: [f64; 3]) -> Result<Self> {
        let a = qubit(bloch1)?;
        let b = qubit(bloch2)?;
        Self::from_matrix(a.kronecker(&b))
    }

    pub fn maximally_mixed() -> Self {
        SpinDensity { matrix: Matrix4::identity() * C64::new(0.25, 0.0) }
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.matrix
    }

    /// Convex combination; weights must sum to one.
    pub fn mix(components: &[(f64, &SpinDensity)]) -> Result<Self> {
        let mut m = Matrix4::zeros();
        for (w, rho) in components {
            if *w < 0.0 {
                return Err(Error::param("mixture", "negative weight"));
            }
            m += rho.matrix * C64::new(*w, 0.0);
        }
        Self::from_matrix(m)
    }

    /// Reduced state of qubit 1 (`first = true`) or qubit 2.
    pub fn marginal(&self, first: bool) -> Matrix2<C64> {
        let mut out = Matrix2::zeros();
        for a in 0..2 {
            for b in 0..2 {
                for k in 0..2 {
                    let (i, j) = if first { (2 * a + k, 2 * b + k) } else { (2 * k + a, 2 * k + b) };
                    out[(a, b)] += self.matrix[(i, j)];
                }
            }
        }
        out
    }
}

impl Purity for SpinDensity {
    fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }
}

fn qubit(bloch: [f64; 3]) -> Result<Matrix2<C64>> {
    let [x, y, z] = bloch;
    let len = (x * x + y * y + z * z).sqrt();
    if len > 1.0 + PURE_TOL {
        return Err(Error::InvalidDensity(format!("Bloch vector length {len} > 1")));
    }
    Ok(Matrix2::new(
        C64::new((1.0 + z) / 2.0, 0.0),
        C64::new(x / 2.0, -y / 2.0),
        C64::new(x / 2.0, y / 2.0),
        C64::new((1.0 - z) / 2.0, 0.0),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maximally_mixed_purity() {
        assert!((SpinDensity::maximally_mixed().purity() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn product_state_is_pure() {
        let rho = SpinDensity::product([1.0, 0.0, 0.0], [0.0, 0.0, -1.0]).unwrap();
        assert!((rho.purity() - 1.0).abs() < PURE_TOL);
        let m1 = rho.marginal(true);
        assert!((m1[(0, 1)].re - 0.5).abs() < 1e-15);
        let m2 = rho.marginal(false);
        assert!((m2[(1, 1)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bell_state_marginals_are_mixed() {
        let s = C64::new(1.0, 0.0);
        let z = C64::new(0.0, 0.0);
        let bell = SpinDensity::pure([s, z, z, s]).unwrap();
        assert!((bell.marginal(true) - Matrix2::identity() * C64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_invalid() {
        assert!(SpinDensity::product([1.0, 1.0, 0.0], [0.0, 0.0, 1.0]).is_err());
        let mut m = Matrix4::identity() * C64::new(0.25, 0.0);
        m[(0, 0)] = C64::new(-0.25, 0.0);
        m[(1, 1)] = C64::new(0.75, 0.0);
        assert!(SpinDensity::from_matrix(m).is_err());
    }
}
