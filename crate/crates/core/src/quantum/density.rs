use nalgebra::{DMatrix, DVector};

use super::linalg::{cmatmul, hermitian_deviation, hermitize};
use super::{PurePathState, Purity, Unitary};
use crate::{Error, Result, C64, PURE_TOL};

/// Largest mode count for which a full `(M+1)×(M+1)` matrix is materialized.
pub const DENSE_MODE_LIMIT: usize = 4096;

/// Roundoff negativity tolerated (and clipped) in a density spectrum.
const NEGATIVITY_TOL: f64 = 1e-10;

/// Relative tolerance under which two diagonal weights are treated as equal
/// when a two-mode unitary mixes them.
const DIAGONAL_MATCH_TOL: f64 = 1e-13;

/// Density operator of one photon over `M` path modes plus the vacuum mode.
///
/// Two storage forms are used. States reachable from a pure input through
/// beamsplitters, loss and mode dephasing all have the shape
/// `|ψ⟩⟨ψ| + diag(d)` and are stored that way at any size. Anything else is
/// held as a dense matrix, which is only allowed up to [`DENSE_MODE_LIMIT`]
/// modes. Index `M` is the vacuum in both forms.
#[derive(Debug, Clone)]
pub struct PhotonDensity {
    modes: usize,
    repr: Repr,
}

#[derive(Debug, Clone)]
enum Repr {
    Dense(DMatrix<C64>),
    Structured { coherent: Vec<C64>, diagonal: Vec<f64> },
}

/// `|ψ⟩⟨ψ|` for a normalized path state.
pub fn density_from_pure(state: &PurePathState) -> PhotonDensity {
    PhotonDensity {
        modes: state.mode_count(),
        repr: Repr::Structured {
            coherent: state.amplitudes().to_vec(),
            diagonal: vec![0.0; state.mode_count() + 1],
        },
    }
}

/// `⟨target|rho|target⟩`.
pub fn fidelity_with_pure(rho: &PhotonDensity, target: &PurePathState) -> Result<f64> {
    if target.mode_count() != rho.modes {
        return Err(Error::DimensionMismatch { expected: rho.modes + 1, found: target.mode_count() + 1 });
    }
    Ok(rho.expectation(target.amplitudes())?.clamp(0.0, 1.0))
}

impl PhotonDensity {
    /// Uniform mixture over the `M` path modes.
    pub fn maximally_mixed(modes: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::param("mode_count", "need at least one path mode"));
        }
        let mut diagonal = vec![1.0 / modes as f64; modes + 1];
        diagonal[modes] = 0.0;
        Ok(PhotonDensity {
            modes,
            repr: Repr::Structured { coherent: vec![C64::new(0.0, 0.0); modes + 1], diagonal },
        })
    }

    /// Convex combination of pure states. Weights must sum to one.
    pub fn mixture(components: &[(f64, &PurePathState)]) -> Result<Self> {
        let modes = components
            .first()
            .map(|(_, s)| s.mode_count())
            .ok_or_else(|| Error::param("mixture", "no components"))?;
        check_dense_size(modes)?;
        let mut m = DMatrix::zeros(modes + 1, modes + 1);
        for (w, s) in components {
            if s.mode_count() != modes {
                return Err(Error::DimensionMismatch { expected: modes + 1, found: s.mode_count() + 1 });
            }
            if *w < 0.0 {
                return Err(Error::param("mixture", "negative weight"));
            }
            let v = DVector::from_column_slice(s.amplitudes());
            m += (&v * v.adjoint()) * C64::new(*w, 0.0);
        }
        Self::from_matrix(m)
    }

    /// Validates an explicit `(M+1)×(M+1)` matrix.
    ///
    /// Eigenvalues between `-1e-10` and zero are clipped and the result is
    /// renormalized; anything more negative is rejected.
    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self> {
        let n = matrix.nrows();
        if n != matrix.ncols() {
            return Err(Error::DimensionMismatch { expected: n, found: matrix.ncols() });
        }
        if n < 2 {
            return Err(Error::param("mode_count", "need at least one path mode"));
        }
        check_dense_size(n - 1)?;
        let dev = hermitian_deviation(&matrix);
        if dev > PURE_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (deviation {dev:e})")));
        }
        let trace: f64 = (0..n).map(|i| matrix[(i, i)].re).sum();
        if (trace - 1.0).abs() > PURE_TOL {
            return Err(Error::InvalidDensity(format!("trace {trace} != 1")));
        }
        let mut matrix = matrix;
        hermitize(&mut matrix);
        let matrix = clip_spectrum(matrix)?;
        Ok(PhotonDensity { modes: n - 1, repr: Repr::Dense(matrix) })
    }

    pub fn mode_count(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        self.modes + 1
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.repr, Repr::Dense(_))
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        match &self.repr {
            Repr::Dense(m) => m[(i, j)],
            Repr::Structured { coherent, diagonal } => {
                let mut z = coherent[i] * coherent[j].conj();
                if i == j {
                    z += diagonal[i];
                }
                z
            }
        }
    }

    pub fn to_matrix(&self) -> Result<DMatrix<C64>> {
        check_dense_size(self.modes)?;
        Ok(match &self.repr {
            Repr::Dense(m) => m.clone(),
            Repr::Structured { .. } => DMatrix::from_fn(self.dim(), self.dim(), |i, j| self.entry(i, j)),
        })
    }

    /// Diagonal, vacuum last.
    pub fn populations(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Dense(m) => (0..self.dim()).map(|i| m[(i, i)].re).collect(),
            Repr::Structured { coherent, diagonal } => {
                coherent.iter().zip(diagonal).map(|(c, d)| c.norm_sqr() + d).collect()
            }
        }
    }

    pub fn trace(&self) -> f64 {
        self.populations().iter().sum()
    }

    pub fn photon_trace(&self) -> f64 {
        self.populations()[..self.modes].iter().sum()
    }

    pub fn vacuum_population(&self) -> f64 {
        self.entry(self.modes, self.modes).re
    }

    /// `⟨χ|rho|χ⟩` for an arbitrary (not necessarily normalized) vector.
    pub fn expectation(&self, chi: &[C64]) -> Result<f64> {
        if chi.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: chi.len() });
        }
        Ok(match &self.repr {
            Repr::Dense(m) => {
                let v = DVector::from_column_slice(chi);
                (v.adjoint() * m * &v)[(0, 0)].re
            }
            Repr::Structured { coherent, diagonal } => {
                let overlap: C64 = chi.iter().zip(coherent).map(|(x, c)| x.conj() * c).sum();
                overlap.norm_sqr() + chi.iter().zip(diagonal).map(|(x, d)| x.norm_sqr() * d).sum::<f64>()
            }
        })
    }

    /// `U rho U†` with `U` acting on the photon modes.
    pub fn apply_unitary(&self, u: &Unitary) -> Result<Self> {
        if u.dim() != self.modes {
            return Err(Error::DimensionMismatch { expected: self.modes, found: u.dim() });
        }
        let mut out = self.clone();
        if let Repr::Structured { coherent, diagonal } = &mut out.repr {
            if uniform(&diagonal[..self.modes]) {
                let rotated = u.apply_to(&coherent[..self.modes])?;
                coherent[..self.modes].copy_from_slice(&rotated);
                return Ok(out);
            }
        }
        out.densify()?;
        let Repr::Dense(m) = &mut out.repr else { unreachable!() };
        let n = self.modes;
        let photon = m.view((0, 0), (n, n)).into_owned();
        let column = m.view((0, n), (n, 1)).into_owned();
        let photon = cmatmul(&cmatmul(u.matrix(), &photon), &u.matrix().adjoint());
        let column = u.matrix() * column;
        m.view_mut((0, 0), (n, n)).copy_from(&photon);
        m.view_mut((0, n), (n, 1)).copy_from(&column);
        m.view_mut((n, 0), (1, n)).copy_from(&column.adjoint());
        hermitize(m);
        Ok(out)
    }

    /// Photon-sector off-diagonals scaled by `factor`, photon–vacuum
    /// coherences by `sqrt(factor)`. This is the mode-dephasing channel with
    /// independent random phases on every path, so it is completely positive.
    pub fn dephased(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.dephase_in_place(factor);
        out
    }

    /// Amplitude damping of path `mode` into the vacuum with probability `p`.
    pub fn with_loss(&self, mode: usize, p: f64) -> Self {
        let mut out = self.clone();
        out.lose_in_place(mode, p);
        out
    }

    pub(crate) fn dephase_in_place(&mut self, factor: f64) {
        let n = self.modes;
        let keep = factor.clamp(0.0, 1.0);
        let root = keep.sqrt();
        match &mut self.repr {
            Repr::Structured { coherent, diagonal } => {
                for k in 0..n {
                    diagonal[k] += (1.0 - keep) * coherent[k].norm_sqr();
                    coherent[k] *= root;
                }
            }
            Repr::Dense(m) => {
                for i in 0..n {
                    for j in 0..n {
                        if i != j {
                            m[(i, j)] *= keep;
                        }
                    }
                    m[(i, n)] *= root;
                    m[(n, i)] *= root;
                }
            }
        }
    }

    pub(crate) fn lose_in_place(&mut self, mode: usize, p: f64) {
        if p == 0.0 {
            return;
        }
        let n = self.modes;
        let keep = (1.0 - p).sqrt();
        match &mut self.repr {
            Repr::Structured { coherent, diagonal } => {
                diagonal[n] += p * (coherent[mode].norm_sqr() + diagonal[mode]);
                coherent[mode] *= keep;
                diagonal[mode] *= 1.0 - p;
            }
            Repr::Dense(m) => {
                let pop = m[(mode, mode)].re;
                for j in 0..=n {
                    m[(mode, j)] *= keep;
                    m[(j, mode)] *= keep;
                }
                m[(n, n)] += p * pop;
            }
        }
    }

    /// Applies `[[u00, u01], [u10, u11]]` to the pair (`a`, `b`).
    pub(crate) fn two_mode_in_place(&mut self, a: usize, b: usize, u: &[[C64; 2]; 2]) -> Result<()> {
        if let Repr::Structured { coherent, diagonal } = &mut self.repr {
            let (da, db) = (diagonal[a], diagonal[b]);
            if (da - db).abs() <= DIAGONAL_MATCH_TOL * da.max(db) {
                let (x, y) = (coherent[a], coherent[b]);
                coherent[a] = u[0][0] * x + u[0][1] * y;
                coherent[b] = u[1][0] * x + u[1][1] * y;
                return Ok(());
            }
            self.densify()?;
        }
        let Repr::Dense(m) = &mut self.repr else { unreachable!() };
        let dim = m.nrows();
        for j in 0..dim {
            let (x, y) = (m[(a, j)], m[(b, j)]);
            m[(a, j)] = u[0][0] * x + u[0][1] * y;
            m[(b, j)] = u[1][0] * x + u[1][1] * y;
        }
        for i in 0..dim {
            let (x, y) = (m[(i, a)], m[(i, b)]);
            m[(i, a)] = x * u[0][0].conj() + y * u[0][1].conj();
            m[(i, b)] = x * u[1][0].conj() + y * u[1][1].conj();
        }
        m[(a, a)].im = 0.0;
        m[(b, b)].im = 0.0;
        Ok(())
    }

    pub(crate) fn structured_parts(&self) -> Option<(&[C64], &[f64])> {
        match &self.repr {
            Repr::Structured { coherent, diagonal } => Some((coherent, diagonal)),
            Repr::Dense(_) => None,
        }
    }

    fn densify(&mut self) -> Result<()> {
        if let Repr::Structured { .. } = self.repr {
            self.repr = Repr::Dense(self.to_matrix()?);
        }
        Ok(())
    }
}

impl Purity for PhotonDensity {
    fn purity(&self) -> f64 {
        match &self.repr {
            Repr::Dense(m) => m.iter().map(|z| z.norm_sqr()).sum(),
            Repr::Structured { coherent, diagonal } => {
                let n: f64 = coherent.iter().map(|c| c.norm_sqr()).sum();
                let cross: f64 = coherent.iter().zip(diagonal).map(|(c, d)| c.norm_sqr() * d).sum();
                let diag: f64 = diagonal.iter().map(|d| d * d).sum();
                n * n + 2.0 * cross + diag
            }
        }
    }
}

fn uniform(values: &[f64]) -> bool {
    let max = values.iter().cloned().fold(0.0, f64::max);
    values.iter().all(|v| (v - values[0]).abs() <= DIAGONAL_MATCH_TOL * max)
}

fn check_dense_size(modes: usize) -> Result<()> {
    if modes > DENSE_MODE_LIMIT {
        Err(Error::TooLargeForDense(modes))
    } else {
        Ok(())
    }
}

fn clip_spectrum(matrix: DMatrix<C64>) -> Result<DMatrix<C64>> {
    let eig = matrix.clone().symmetric_eigen();
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -NEGATIVITY_TOL {
        return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
    }
    if min >= 0.0 {
        return Ok(matrix);
    }
    let clipped = eig.eigenvalues.map(|l| l.max(0.0));
    let total: f64 = clipped.iter().sum();
    let v = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&clipped.map(|l| C64::new(l / total, 0.0)));
    let mut out = v * d * v.adjoint();
    hermitize(&mut out);
    Ok(out)
}
