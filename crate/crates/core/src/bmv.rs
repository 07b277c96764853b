//! Two-mass gravitational entanglement experiment.
//!
//! Each mass carries a spin, is split by a Stern–Gerlach stage into
//! `|L,↑⟩ + |R,↓⟩`, sits in superposition for `τ`, and is recombined. The
//! recombination restores the position register exactly, so only the
//! 4-dimensional spin state is simulated. Three hypotheses about gravity
//! give three final spin states, told apart by the witness
//! `|⟨σx⊗σz⟩ − ⟨σy⊗σz⟩|`.

use std::fmt;

use nalgebra::{Matrix2, Matrix4};
use rand::distributions::{Distribution, WeightedIndex};
use serde::{Deserialize, Serialize};

use crate::quantum::SpinDensity;
use crate::{rng, Error, Result, C64};

/// CODATA 2018 Newtonian constant, m³·kg⁻¹·s⁻².
pub const G_SI: f64 = 6.674_30e-11;
/// CODATA 2018 reduced Planck constant, J·s.
pub const HBAR_SI: f64 = 1.054_571_817e-34;

/// Experiment parameters in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BmvParamsDoc")]
pub struct BmvParams {
    pub m1_kg: f64,
    pub m2_kg: f64,
    /// Centre separation of the two undeflected masses.
    pub d_m: f64,
    /// Split between the `L` and `R` branches of each mass.
    pub delta_x_m: f64,
    pub tau_s: f64,
    pub g_m3_per_kg_s2: f64,
    pub hbar_j_s: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BmvParamsDoc {
    m1_kg: f64,
    m2_kg: f64,
    d_m: f64,
    delta_x_m: f64,
    tau_s: f64,
    #[serde(default = "default_g")]
    g_m3_per_kg_s2: f64,
    #[serde(default = "default_hbar")]
    hbar_j_s: f64,
}

fn default_g() -> f64 {
    G_SI
}

fn default_hbar() -> f64 {
    HBAR_SI
}

impl TryFrom<BmvParamsDoc> for BmvParams {
    type Error = Error;
    fn try_from(d: BmvParamsDoc) -> Result<Self> {
        let p = BmvParams {
            m1_kg: d.m1_kg,
            m2_kg: d.m2_kg,
            d_m: d.d_m,
            delta_x_m: d.delta_x_m,
            tau_s: d.tau_s,
            g_m3_per_kg_s2: d.g_m3_per_kg_s2,
            hbar_j_s: d.hbar_j_s,
        };
        p.validate()?;
        Ok(p)
    }
}

impl BmvParams {
    /// Illustrative desk-scale values, not measured data: 10⁻¹⁴ kg masses
    /// 250 µm apart, split by 225 µm, held for one second.
    pub fn illustrative() -> Self {
        BmvParams {
            m1_kg: 1e-14,
            m2_kg: 1e-14,
            d_m: 250e-6,
            delta_x_m: 225e-6,
            tau_s: 1.0,
            g_m3_per_kg_s2: G_SI,
            hbar_j_s: HBAR_SI,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("m1_kg", self.m1_kg),
            ("m2_kg", self.m2_kg),
            ("d_m", self.d_m),
            ("delta_x_m", self.delta_x_m),
            ("g_m3_per_kg_s2", self.g_m3_per_kg_s2),
            ("hbar_j_s", self.hbar_j_s),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(name, format!("must be positive and finite, got {v}")));
            }
        }
        if !(self.tau_s.is_finite() && self.tau_s >= 0.0) {
            return Err(Error::param("tau_s", format!("must be non-negative and finite, got {}", self.tau_s)));
        }
        if self.delta_x_m >= self.d_m {
            return Err(Error::param(
                "delta_x_m",
                format!("split {} m must be smaller than separation {} m", self.delta_x_m, self.d_m),
            ));
        }
        Ok(())
    }

    pub fn with_tau(mut self, tau_s: f64) -> Result<Self> {
        self.tau_s = tau_s;
        self.validate()?;
        Ok(self)
    }
}

/// Gravitational phases for the four branch pairings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BmvPhases {
    /// Both masses in the same branch, distance `d`.
    pub phi: f64,
    /// Mass 1 in `L`, mass 2 in `R`: distance `d + Δx`.
    pub phi_lr: f64,
    /// Mass 1 in `R`, mass 2 in `L`: distance `d − Δx`.
    pub phi_rl: f64,
    pub delta_phi_lr: f64,
    pub delta_phi_rl: f64,
}

pub fn bmv_phases(params: &BmvParams) -> Result<BmvPhases> {
    params.validate()?;
    let k = params.g_m3_per_kg_s2 * params.m1_kg * params.m2_kg * params.tau_s / params.hbar_j_s;
    let phi = k / params.d_m;
    let phi_lr = k / (params.d_m + params.delta_x_m);
    let phi_rl = k / (params.d_m - params.delta_x_m);
    Ok(BmvPhases { phi, phi_lr, phi_rl, delta_phi_lr: phi_lr - phi, delta_phi_rl: phi_rl - phi })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    /// Gravity acts as a coherent quantum interaction.
    CoherentGravity,
    /// Gravity decoheres but does not collapse: the spins end as they began.
    DecoherentNoCollapse,
    /// Gravity collapses each spin to the maximally mixed state.
    DecoherentCollapse,
}

impl Hypothesis {
    pub const ALL: [Hypothesis; 3] =
        [Hypothesis::CoherentGravity, Hypothesis::DecoherentNoCollapse, Hypothesis::DecoherentCollapse];

    pub fn label(&self) -> &'static str {
        match self {
            Hypothesis::CoherentGravity => "coherent",
            Hypothesis::DecoherentNoCollapse => "no_collapse",
            Hypothesis::DecoherentCollapse => "collapse",
        }
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Final spin state after recombination.
pub fn evolve_bmv(params: &BmvParams, hypothesis: Hypothesis) -> Result<SpinDensity> {
    let half = C64::new(0.5, 0.0);
    match hypothesis {
        Hypothesis::CoherentGravity => {
            let ph = bmv_phases(params)?;
            SpinDensity::pure([
                half,
                C64::from_polar(0.5, ph.delta_phi_lr),
                C64::from_polar(0.5, ph.delta_phi_rl),
                half,
            ])
        }
        Hypothesis::DecoherentNoCollapse => {
            params.validate()?;
            SpinDensity::pure([half; 4])
        }
        Hypothesis::DecoherentCollapse => {
            params.validate()?;
            Ok(SpinDensity::maximally_mixed())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn pauli(self) -> Matrix2<C64> {
        let (o, z, i) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 1.0));
        match self {
            Axis::X => Matrix2::new(z, o, o, z),
            Axis::Y => Matrix2::new(z, -i, i, z),
            Axis::Z => Matrix2::new(o, z, z, -o),
        }
    }

    /// Projector onto the `sign = ±1` eigenspace.
    fn projector(self, sign: f64) -> Matrix2<C64> {
        (Matrix2::identity() + self.pauli() * C64::new(sign, 0.0)) * C64::new(0.5, 0.0)
    }
}

/// `tr(rho · σ_a ⊗ σ_b)`.
pub fn pauli_correlator(rho: &SpinDensity, axis1: Axis, axis2: Axis) -> f64 {
    let op: Matrix4<C64> = axis1.pauli().kronecker(&axis2.pauli());
    (rho.matrix() * op).trace().re
}

/// `|⟨σx⊗σz⟩ − ⟨σy⊗σz⟩|`.
pub fn entanglement_witness(rho: &SpinDensity) -> f64 {
    (pauli_correlator(rho, Axis::X, Axis::Z) - pauli_correlator(rho, Axis::Y, Axis::Z)).abs()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessEstimate {
    pub estimate: f64,
    pub std_error: f64,
}

/// Born probabilities of the four `(s1, s2)` outcomes, ordered
/// `(+,+), (+,−), (−,+), (−,−)`.
pub fn outcome_probabilities(rho: &SpinDensity, axis1: Axis, axis2: Axis) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (idx, (s1, s2)) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)].into_iter().enumerate() {
        let proj = axis1.projector(s1).kronecker(&axis2.projector(s2));
        out[idx] = (rho.matrix() * proj).trace().re.max(0.0);
    }
    out
}

/// Monte Carlo witness estimate from `runs_per_setting` projective
/// measurements in each of the (x, z) and (y, z) settings.
///
/// Each setting's correlator is the mean outcome product; its variance is
/// `(1 − E²)/n`. The two settings are independent, so the standard error of
/// their difference adds in quadrature.
pub fn sample_witness(rho: &SpinDensity, runs_per_setting: u64, seed: u64) -> Result<WitnessEstimate> {
    if runs_per_setting == 0 {
        return Err(Error::param("runs_per_setting", "must be at least 1"));
    }
    let n = runs_per_setting as f64;
    let mut correlators = [0.0; 2];
    for (setting, axis1) in [Axis::X, Axis::Y].into_iter().enumerate() {
        let probs = outcome_probabilities(rho, axis1, Axis::Z);
        let dist = WeightedIndex::new(probs).map_err(|e| Error::param("probabilities", e.to_string()))?;
        let mut g = rng::stream(seed, setting as u64);
        let mut sum: i64 = 0;
        for _ in 0..runs_per_setting {
            sum += match dist.sample(&mut g) {
                0 | 3 => 1,
                _ => -1,
            };
        }
        correlators[setting] = sum as f64 / n;
    }
    let var: f64 = correlators.iter().map(|e| (1.0 - e * e) / n).sum();
    Ok(WitnessEstimate { estimate: (correlators[0] - correlators[1]).abs(), std_error: var.sqrt() })
}

/// Analytic witness of every hypothesis at each `tau`.
pub fn witness_sweep(params: &BmvParams, taus: &[f64]) -> Result<Vec<(f64, [f64; 3])>> {
    taus.iter()
        .map(|&tau| {
            let p = params.with_tau(tau)?;
            let mut w = [0.0; 3];
            for (slot, h) in w.iter_mut().zip(Hypothesis::ALL) {
                *slot = entanglement_witness(&evolve_bmv(&p, h)?);
            }
            Ok((tau, w))
        })
        .collect()
}

/// Largest coherent-gravity witness over `taus`, with its `tau`.
pub fn max_coherent_witness(params: &BmvParams, taus: &[f64]) -> Result<(f64, f64)> {
    let mut best = (f64::NAN, f64::NEG_INFINITY);
    for (tau, w) in witness_sweep(params, taus)? {
        if w[0] > best.1 {
            best = (tau, w[0]);
        }
    }
    Ok(best)
}
