use crate::{Error, Result, C64, PURE_TOL};

/// Pure state of one photon spread over `M` path modes plus a vacuum mode.
///
/// Amplitude `k < M` is the photon in path `k`; amplitude `M` is the photon
/// having been lost. In occupation notation path `k` is the basis vector with
/// a single `1` at position `k`, so a path state with equal amplitudes is the
/// M-qubit W state.
#[derive(Debug, Clone, PartialEq)]
pub struct PurePathState {
    amplitudes: Vec<C64>,
}

impl PurePathState {
    /// Takes all `M + 1` amplitudes, vacuum last.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::param("mode_count", "need at least one path mode"));
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > PURE_TOL {
            return Err(Error::NotNormalized(norm_sq));
        }
        Ok(PurePathState { amplitudes })
    }

    /// Photon-mode amplitudes only; the vacuum amplitude is zero.
    pub fn from_photon_amplitudes(photon: &[C64]) -> Result<Self> {
        let mut amplitudes = photon.to_vec();
        amplitudes.push(C64::new(0.0, 0.0));
        Self::new(amplitudes)
    }

    /// Renormalizes before validating.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm * norm));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::new(amplitudes)
    }

    pub fn basis(mode_count: usize, mode: usize) -> Result<Self> {
        if mode > mode_count {
            return Err(Error::DimensionMismatch { expected: mode_count + 1, found: mode + 1 });
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); mode_count + 1];
        amplitudes[mode] = C64::new(1.0, 0.0);
        Self::new(amplitudes)
    }

    pub fn vacuum(mode_count: usize) -> Result<Self> {
        Self::basis(mode_count, mode_count)
    }

    /// `|W^M⟩`: equal positive amplitude `1/√M` on every path mode.
    pub fn w_state(mode_count: usize) -> Result<Self> {
        let a = C64::new(1.0 / (mode_count as f64).sqrt(), 0.0);
        Self::from_photon_amplitudes(&vec![a; mode_count])
    }

    pub fn mode_count(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn photon_amplitudes(&self) -> &[C64] {
        &self.amplitudes[..self.mode_count()]
    }

    pub fn vacuum_amplitude(&self) -> C64 {
        self.amplitudes[self.mode_count()]
    }

    pub fn inner(&self, other: &PurePathState) -> Result<C64> {
        if self.amplitudes.len() != other.amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amplitudes.len(),
                found: other.amplitudes.len(),
            });
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }
}
