//! Operational consequences of an N-discretized Bloch sphere.
//!
//! `N` can be astronomically large (2^1000 and beyond), so it is carried as
//! `log2_N` and every formula works in log space. The only physics modeled
//! is what the discretization implies for an experiment: at most
//! `floor(log2 N)` qubits can be maximally entangled, which for the doubling
//! W cascade means at most `floor(log2 log2 N)` iterations. What happens
//! past the cutoff is not pinned down, so two labeled decoherence models
//! bracket it.

use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::quantum::PhotonDensity;
use crate::{is_power_of_two, Error, Result};

/// Behaviour of the generated state once its width exceeds the cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecoherenceModel {
    /// Every photon-sector coherence is destroyed.
    HardCutoff,
    /// Coherences shrink by `gamma` per iteration beyond the cutoff.
    Partial { gamma: f64 },
}

impl fmt::Display for DecoherenceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecoherenceModel::HardCutoff => write!(f, "hard-cutoff"),
            DecoherenceModel::Partial { gamma } => write!(f, "partial(gamma={gamma})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "IstParamsDoc", into = "IstParamsDoc")]
pub struct IstParams {
    log2_n: f64,
    model: DecoherenceModel,
}

/// Config form: `{ log2_N, model = "hard-cutoff" | "partial", gamma }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IstParamsDoc {
    #[serde(rename = "log2_N")]
    log2_n: f64,
    #[serde(default = "default_model")]
    model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
}

fn default_model() -> String {
    "hard-cutoff".to_string()
}

impl TryFrom<IstParamsDoc> for IstParams {
    type Error = Error;

    fn try_from(doc: IstParamsDoc) -> Result<Self> {
        let model = match (doc.model.as_str(), doc.gamma) {
            ("hard-cutoff", None) => DecoherenceModel::HardCutoff,
            ("hard-cutoff", Some(_)) => return Err(Error::param("gamma", "only valid for the partial model")),
            ("partial", Some(gamma)) => DecoherenceModel::Partial { gamma },
            ("partial", None) => return Err(Error::param("gamma", "required for the partial model")),
            (other, _) => return Err(Error::param("model", format!("unknown model `{other}`"))),
        };
        IstParams::new(doc.log2_n, model)
    }
}

impl From<IstParams> for IstParamsDoc {
    fn from(p: IstParams) -> Self {
        let (model, gamma) = match p.model {
            DecoherenceModel::HardCutoff => ("hard-cutoff", None),
            DecoherenceModel::Partial { gamma } => ("partial", Some(gamma)),
        };
        IstParamsDoc { log2_n: p.log2_n, model: model.to_string(), gamma }
    }
}

impl IstParams {
    pub fn new(log2_n: f64, model: DecoherenceModel) -> Result<Self> {
        if !(log2_n.is_finite() && log2_n > 0.0) {
            return Err(Error::param("log2_N", format!("must be positive and finite, got {log2_n}")));
        }
        if let DecoherenceModel::Partial { gamma } = model {
            if !(0.0..=1.0).contains(&gamma) {
                return Err(Error::param("gamma", format!("must lie in [0, 1], got {gamma}")));
            }
        }
        Ok(IstParams { log2_n, model })
    }

    pub fn hard_cutoff(log2_n: f64) -> Result<Self> {
        Self::new(log2_n, DecoherenceModel::HardCutoff)
    }

    pub fn partial(log2_n: f64, gamma: f64) -> Result<Self> {
        Self::new(log2_n, DecoherenceModel::Partial { gamma })
    }

    pub fn log2_n(&self) -> f64 {
        self.log2_n
    }

    /// `log10 N`, for reporting.
    pub fn log10_n(&self) -> f64 {
        self.log2_n * std::f64::consts::LOG10_2
    }

    pub fn model(&self) -> DecoherenceModel {
        self.model
    }
}

/// `floor(log2 N)`.
pub fn max_entangled_qubits(params: &IstParams) -> u64 {
    params.log2_n.floor() as u64
}

/// `floor(log2 log2 N)`; needs `N ≥ 2`.
pub fn max_iterations(params: &IstParams) -> Result<u32> {
    if params.log2_n < 1.0 {
        return Err(Error::param("log2_N", format!("iteration limit needs log2_N >= 1, got {}", params.log2_n)));
    }
    Ok(params.log2_n.log2().floor() as u32)
}

/// Smallest `log2 N` allowing `qubits` maximally entangled qubits.
pub fn min_n_for_qubits(qubits: u64) -> Result<f64> {
    if qubits == 0 {
        return Err(Error::param("qubits", "must be at least 1"));
    }
    Ok(qubits as f64)
}

/// Probability a photonic qubit survives the generation cascade, and the
/// certification stage as well when `certify` is set. Each stage makes every
/// path cross `log2 M` beamsplitters.
pub fn survival_probability(p: f64, qubits: usize, certify: bool) -> Result<f64> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::param("loss_per_element", format!("must lie in [0, 1), got {p}")));
    }
    if !is_power_of_two(qubits) {
        return Err(Error::NotPowerOfTwo(qubits));
    }
    let crossings = qubits.trailing_zeros() as i32 * if certify { 2 } else { 1 };
    Ok((1.0 - p).powi(crossings))
}

/// Coherence factor applied to a state spread over `width` modes: 1 at or
/// below the cutoff, 0 past it for the hard model, and
/// `gamma^(log2 width - I_max)` for the partial model.
pub fn coherence_factor(params: &IstParams, width: usize) -> f64 {
    if width as u64 <= max_entangled_qubits(params) {
        return 1.0;
    }
    match params.model {
        DecoherenceModel::HardCutoff => 0.0,
        DecoherenceModel::Partial { gamma } => {
            let i_max = max_iterations(params).unwrap_or(0) as f64;
            let excess = (width as f64).log2() - i_max;
            gamma.powf(excess)
        }
    }
}

/// Applies the configured model to a state entangled across `width` modes.
pub fn ist_decoherence(rho: &PhotonDensity, params: &IstParams, width: usize) -> PhotonDensity {
    let factor = coherence_factor(params, width);
    if factor == 1.0 {
        return rho.clone();
    }
    rho.dephased(factor)
}

/// Bloch angles snapped onto the `N`-point grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnappedAngles {
    pub theta: f64,
    pub phi: f64,
    /// Set when `N` exceeds 2^52 and the grid is finer than `f64` can
    /// resolve; the angles are then passed through unchanged.
    pub finer_than_float: bool,
}

/// Largest `log2 N` for which the grid spacing is snapped explicitly.
pub const SNAP_LOG2_LIMIT: f64 = 52.0;

pub fn discretize_bloch(theta: f64, phi: f64, params: &IstParams) -> Result<SnappedAngles> {
    if !theta.is_finite() || !phi.is_finite() {
        return Err(Error::param("angle", "must be finite"));
    }
    if params.log2_n > SNAP_LOG2_LIMIT {
        return Ok(SnappedAngles { theta, phi, finer_than_float: true });
    }
    let points = params.log2_n.exp2().round().max(1.0);
    let step = TAU / points;
    let snap = |x: f64| (x / step).round() * step;
    Ok(SnappedAngles { theta: snap(theta), phi: snap(phi), finer_than_float: false })
}
