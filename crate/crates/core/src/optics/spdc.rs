//! Two photons on a ring of apertures.
//!
//! The ring is cut into an upper and a lower half of `M` sectors each. A
//! down-converted pair always lands in anti-correlated sectors, so the pair
//! is `(1/√M) Σ_k e^{iθ_k} |k⟩_upper |antipode(k)⟩_lower` and each photon on
//! its own is a W state over `M` sectors. Halves are indexed so that
//! `antipode(k) = k`: lower sector `k` sits diametrically opposite upper
//! sector `k`, i.e. at ring position `k + M` when the upper half occupies
//! positions `0..M`.
//!
//! Combining adjacent apertures on each half with the same butterfly used
//! for certification maps the pair onto detector pairs; with phase-locked
//! pairs the final upper and lower detectors stay perfectly correlated.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use rand::Rng;

use crate::{is_power_of_two, rng, Error, Result, C64};

/// How the per-sector phases of the two photons are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseModel {
    /// One random phase per anti-correlated pair. It appears with opposite
    /// sign on the two photons (the pair phase is locked to the pump), so
    /// the sector phases are random on each half but cancel in the joint
    /// amplitude.
    Shared,
    /// Independent random phases on each photon: the control case where the
    /// pair coherence is deliberately broken.
    Independent,
}

impl PhaseModel {
    pub fn label(&self) -> &'static str {
        match self {
            PhaseModel::Shared => "shared",
            PhaseModel::Independent => "independent",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoubleWState {
    sector_count: usize,
    /// Row = upper sector, column = lower sector.
    joint_amplitudes: DMatrix<C64>,
    phase_seed: u64,
    upper_phases: Vec<f64>,
    lower_phases: Vec<f64>,
}

/// Joint click probabilities over (upper detector, lower detector).
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    sector_count: usize,
    probabilities: DMatrix<f64>,
}

pub fn antipode(sector: usize) -> usize {
    sector
}

/// Pair state with phases from the shared model.
pub fn make_double_w(sectors: usize, phase_seed: u64) -> Result<DoubleWState> {
    DoubleWState::seeded(sectors, phase_seed, PhaseModel::Shared)
}

impl DoubleWState {
    pub fn seeded(sectors: usize, phase_seed: u64, model: PhaseModel) -> Result<Self> {
        check_sectors(sectors)?;
        let mut g = rng::seeded(phase_seed);
        let upper: Vec<f64> = (0..sectors).map(|_| g.gen::<f64>() * TAU).collect();
        let lower: Vec<f64> = match model {
            PhaseModel::Shared => upper.iter().map(|t| -t).collect(),
            PhaseModel::Independent => (0..sectors).map(|_| g.gen::<f64>() * TAU).collect(),
        };
        let mut state = Self::with_phases(&upper, &lower)?;
        state.phase_seed = phase_seed;
        Ok(state)
    }

    /// Explicit sector phases for each photon.
    pub fn with_phases(upper: &[f64], lower: &[f64]) -> Result<Self> {
        let sectors = upper.len();
        check_sectors(sectors)?;
        if lower.len() != sectors {
            return Err(Error::DimensionMismatch { expected: sectors, found: lower.len() });
        }
        let a = 1.0 / (sectors as f64).sqrt();
        let mut joint = DMatrix::zeros(sectors, sectors);
        for k in 0..sectors {
            joint[(k, antipode(k))] = C64::from_polar(a, upper[k] + lower[antipode(k)]);
        }
        Ok(DoubleWState {
            sector_count: sectors,
            joint_amplitudes: joint,
            phase_seed: 0,
            upper_phases: upper.to_vec(),
            lower_phases: lower.to_vec(),
        })
    }

    pub fn sector_count(&self) -> usize {
        self.sector_count
    }

    pub fn joint_amplitudes(&self) -> &DMatrix<C64> {
        &self.joint_amplitudes
    }

    pub fn phase_seed(&self) -> u64 {
        self.phase_seed
    }

    pub fn upper_phases(&self) -> &[f64] {
        &self.upper_phases
    }

    pub fn lower_phases(&self) -> &[f64] {
        &self.lower_phases
    }

    /// Sector distribution of the upper photon alone.
    pub fn upper_marginal(&self) -> Vec<f64> {
        self.joint_amplitudes.row_iter().map(|r| r.iter().map(|z| z.norm_sqr()).sum()).collect()
    }

    pub fn lower_marginal(&self) -> Vec<f64> {
        self.joint_amplitudes.column_iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum()).collect()
    }

    pub fn distribution(&self) -> JointDistribution {
        JointDistribution {
            sector_count: self.sector_count,
            probabilities: self.joint_amplitudes.map(|z| z.norm_sqr()),
        }
    }
}

fn check_sectors(sectors: usize) -> Result<()> {
    if sectors < 2 || !is_power_of_two(sectors) {
        return Err(Error::NotPowerOfTwo(sectors));
    }
    Ok(())
}

/// Applies `rounds` layers of adjacent-aperture 50:50 merges to each half
/// independently. Layer `j` mixes sectors `k` and `k + 2^j` (bit `j` of `k`
/// clear); after `log2 M` layers each half has been mapped through the full
/// Walsh transform.
pub fn combine_apertures(state: &DoubleWState, rounds: u32) -> Result<(DoubleWState, JointDistribution)> {
    let m = state.sector_count;
    let max = m.trailing_zeros();
    if rounds > max {
        return Err(Error::param("rounds", format!("{rounds} exceeds log2({m}) = {max}")));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut joint = state.joint_amplitudes.clone();
    for j in 0..rounds {
        let half = 1usize << j;
        for k in (0..m).filter(|k| k & half == 0) {
            for c in 0..m {
                let (x, y) = (joint[(k, c)], joint[(k + half, c)]);
                joint[(k, c)] = (x + y) * s;
                joint[(k + half, c)] = (x - y) * s;
            }
            for r in 0..m {
                let (x, y) = (joint[(r, k)], joint[(r, k + half)]);
                joint[(r, k)] = (x + y) * s;
                joint[(r, k + half)] = (x - y) * s;
            }
        }
    }
    let evolved = DoubleWState { joint_amplitudes: joint, ..state.clone() };
    let dist = evolved.distribution();
    Ok((evolved, dist))
}

impl JointDistribution {
    /// Builds a distribution from an explicit `M×M` probability table.
    pub fn new(probabilities: DMatrix<f64>) -> Result<Self> {
        if probabilities.nrows() != probabilities.ncols() {
            return Err(Error::DimensionMismatch { expected: probabilities.nrows(), found: probabilities.ncols() });
        }
        let total: f64 = probabilities.iter().sum();
        if probabilities.iter().any(|&p| p < 0.0) || (total - 1.0).abs() > crate::CHANNEL_TOL {
            return Err(Error::param("joint distribution", format!("not normalized (total {total})")));
        }
        Ok(JointDistribution { sector_count: probabilities.nrows(), probabilities })
    }

    pub fn sector_count(&self) -> usize {
        self.sector_count
    }

    pub fn probability(&self, upper: usize, lower: usize) -> f64 {
        self.probabilities[(upper, lower)]
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

/// Mass on the designated pairing `(k, antipode(k))`.
pub fn correlation_score(dist: &JointDistribution) -> f64 {
    (0..dist.sector_count).map(|k| dist.probability(k, antipode(k))).sum()
}

/// Mean correlation score after full aperture combination over `draws`
/// independently seeded pairs, with the standard error of that mean.
pub fn mean_correlation(sectors: usize, model: PhaseModel, draws: u64, seed: u64) -> Result<(f64, f64)> {
    if draws == 0 {
        return Err(Error::param("draws", "must be at least 1"));
    }
    let rounds = sectors.trailing_zeros();
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for i in 0..draws {
        let state = DoubleWState::seeded(sectors, rng::child_seed(seed, i), model)?;
        let (_, dist) = combine_apertures(&state, rounds)?;
        let c = correlation_score(&dist);
        sum += c;
        sum_sq += c * c;
    }
    let n = draws as f64;
    let mean = sum / n;
    let var = if draws > 1 { ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
    Ok((mean, (var / n).sqrt()))
}
