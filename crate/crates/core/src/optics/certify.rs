use nalgebra::DMatrix;
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use crate::quantum::{PhotonDensity, PurePathState, Unitary, DENSE_MODE_LIMIT};
use crate::{is_power_of_two, Error, Result, C64};

/// The four sign patterns of the 4-mode W state, in the order they are
/// usually listed. Pattern `i` is Walsh row `[0, 3, 2, 1][i]`.
pub const FOUR_MODE_PATTERNS: [[f64; 4]; 4] = [
    [1.0, 1.0, 1.0, 1.0],
    [1.0, -1.0, -1.0, 1.0],
    [1.0, 1.0, -1.0, -1.0],
    [1.0, -1.0, 1.0, -1.0],
];

/// A linear-optical mode transform placed in front of the detectors.
#[derive(Debug, Clone, PartialEq)]
pub enum ModeTransform {
    /// Natural-order Walsh–Hadamard transform over `modes = 2^I` paths:
    /// `T[j][k] = (-1)^popcount(j & k) / √M`. Applied with the fast
    /// butterfly, so it works at any size.
    Walsh { modes: usize },
    Dense(Unitary),
}

/// Certification stage for `M = 2^I` modes.
///
/// Detector `j` receives Walsh row `j`: the phase-permuted W state with
/// amplitudes `(-1)^popcount(j & k) / √M` clicks detector `j` with
/// certainty, and the all-positive W state clicks detector 0.
pub fn certification_transform(modes: usize) -> Result<ModeTransform> {
    if !is_power_of_two(modes) {
        return Err(Error::NotPowerOfTwo(modes));
    }
    Ok(ModeTransform::Walsh { modes })
}

/// Phase-permuted W state for Walsh row `row`.
pub fn walsh_pattern_state(modes: usize, row: usize) -> Result<PurePathState> {
    if !is_power_of_two(modes) {
        return Err(Error::NotPowerOfTwo(modes));
    }
    if row >= modes {
        return Err(Error::param("row", format!("{row} >= {modes}")));
    }
    let a = 1.0 / (modes as f64).sqrt();
    let amps: Vec<C64> = (0..modes).map(|k| C64::new(walsh_sign(row, k) * a, 0.0)).collect();
    PurePathState::from_photon_amplitudes(&amps)
}

/// Walsh row index of a ±1 sign pattern, if it is one.
pub fn walsh_row_of(signs: &[f64]) -> Option<usize> {
    let m = signs.len();
    if !is_power_of_two(m) {
        return None;
    }
    (0..m).find(|&r| (0..m).all(|k| signs[k] == walsh_sign(r, k) * signs[0]))
}

fn walsh_sign(row: usize, col: usize) -> f64 {
    if (row & col).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Unnormalized in-place Walsh butterfly.
fn fwht(v: &mut [C64]) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for j in block..block + h {
                let (x, y) = (v[j], v[j + h]);
                v[j] = x + y;
                v[j + h] = x - y;
            }
        }
        h *= 2;
    }
}

impl ModeTransform {
    pub fn dim(&self) -> usize {
        match self {
            ModeTransform::Walsh { modes } => *modes,
            ModeTransform::Dense(u) => u.dim(),
        }
    }

    pub fn apply_to(&self, amplitudes: &[C64]) -> Result<Vec<C64>> {
        if amplitudes.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: amplitudes.len() });
        }
        match self {
            ModeTransform::Walsh { modes } => {
                let mut v = amplitudes.to_vec();
                fwht(&mut v);
                let scale = 1.0 / (*modes as f64).sqrt();
                v.iter_mut().for_each(|z| *z *= scale);
                Ok(v)
            }
            ModeTransform::Dense(u) => u.apply_to(amplitudes),
        }
    }

    pub fn to_unitary(&self) -> Result<Unitary> {
        match self {
            ModeTransform::Dense(u) => Ok(u.clone()),
            ModeTransform::Walsh { modes } => {
                if *modes > DENSE_MODE_LIMIT {
                    return Err(Error::TooLargeForDense(*modes));
                }
                let a = 1.0 / (*modes as f64).sqrt();
                Ok(Unitary::new_unchecked(DMatrix::from_fn(*modes, *modes, |j, k| {
                    C64::new(walsh_sign(j, k) * a, 0.0)
                })))
            }
        }
    }

    /// `Σ_k |T_jk|^2 w_k` for every row `j`.
    fn spread(&self, weights: &[f64]) -> Vec<f64> {
        match self {
            ModeTransform::Walsh { modes } => {
                let mean = weights.iter().sum::<f64>() / *modes as f64;
                vec![mean; *modes]
            }
            ModeTransform::Dense(u) => {
                let m = u.matrix();
                (0..u.dim())
                    .map(|j| (0..u.dim()).map(|k| m[(j, k)].norm_sqr() * weights[k]).sum())
                    .collect()
            }
        }
    }
}

/// Click probabilities behind `transform`: entries `0..M` are the detectors,
/// entry `M` is "no click" (photon lost).
pub fn detector_distribution(rho: &PhotonDensity, transform: &ModeTransform) -> Result<Vec<f64>> {
    let m = rho.mode_count();
    if transform.dim() != m {
        return Err(Error::DimensionMismatch { expected: m, found: transform.dim() });
    }
    let mut probs = if let Some((coherent, diagonal)) = rho.structured_parts() {
        let rotated = transform.apply_to(&coherent[..m])?;
        let spread = transform.spread(&diagonal[..m]);
        rotated.iter().zip(spread).map(|(z, s)| z.norm_sqr() + s).collect::<Vec<_>>()
    } else {
        let block = rho.to_matrix()?.view((0, 0), (m, m)).into_owned();
        let u = transform.to_unitary()?;
        let rotated = crate::quantum::linalg::cmatmul(&crate::quantum::linalg::cmatmul(u.matrix(), &block), &u.matrix().adjoint());
        (0..m).map(|j| rotated[(j, j)].re).collect()
    };
    probs.push(rho.vacuum_population());
    Ok(probs)
}

/// Draws `runs` detection events and returns the count per outcome.
pub fn sample_clicks<R: Rng + ?Sized>(probabilities: &[f64], runs: u64, rng: &mut R) -> Result<Vec<u64>> {
    let weights: Vec<f64> = probabilities.iter().map(|p| p.max(0.0)).collect();
    let dist = WeightedIndex::new(&weights).map_err(|e| Error::param("probabilities", e.to_string()))?;
    let mut counts = vec![0u64; probabilities.len()];
    for _ in 0..runs {
        counts[dist.sample(rng)] += 1;
    }
    Ok(counts)
}
