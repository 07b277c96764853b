use serde::{Deserialize, Serialize};

use super::BeamsplitterElement;
use crate::ist::{ist_decoherence, IstParams};
use crate::quantum::{density_from_pure, PhotonDensity, PurePathState, Unitary, DENSE_MODE_LIMIT};
use crate::{Error, Result, C64};

/// Largest cascade depth accepted by the builders (2^24 modes).
pub const MAX_ITERATIONS: u32 = 24;

/// Ordered list of beamsplitters over `mode_count` path modes.
///
/// Every element is followed by an independent loss event of probability
/// `loss_per_element` on each of its two output modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NetworkDoc")]
pub struct OpticalNetwork {
    mode_count: usize,
    loss_per_element: f64,
    elements: Vec<BeamsplitterElement>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkDoc {
    mode_count: usize,
    #[serde(default)]
    loss_per_element: f64,
    #[serde(default)]
    elements: Vec<BeamsplitterElement>,
}

impl TryFrom<NetworkDoc> for OpticalNetwork {
    type Error = Error;
    fn try_from(d: NetworkDoc) -> Result<Self> {
        OpticalNetwork::new(d.mode_count, d.elements, d.loss_per_element)
    }
}

impl OpticalNetwork {
    pub fn new(mode_count: usize, elements: Vec<BeamsplitterElement>, loss_per_element: f64) -> Result<Self> {
        if mode_count == 0 {
            return Err(Error::param("mode_count", "must be at least 1"));
        }
        if !(0.0..1.0).contains(&loss_per_element) {
            return Err(Error::param("loss_per_element", format!("must lie in [0, 1), got {loss_per_element}")));
        }
        if let Some(e) = elements.iter().find(|e| e.mode_a >= mode_count || e.mode_b >= mode_count) {
            return Err(Error::param(
                "beamsplitter",
                format!("element ({}, {}) outside {mode_count} modes", e.mode_a, e.mode_b),
            ));
        }
        Ok(OpticalNetwork { mode_count, loss_per_element, elements })
    }

    pub fn with_loss(mut self, loss_per_element: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&loss_per_element) {
            return Err(Error::param("loss_per_element", format!("must lie in [0, 1), got {loss_per_element}")));
        }
        self.loss_per_element = loss_per_element;
        Ok(self)
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn loss_per_element(&self) -> f64 {
        self.loss_per_element
    }

    pub fn elements(&self) -> &[BeamsplitterElement] {
        &self.elements
    }

    /// Number of elements with a port on `mode`.
    pub fn crossings(&self, mode: usize) -> usize {
        self.elements.iter().filter(|e| e.mode_a == mode || e.mode_b == mode).count()
    }

    /// Runs `rho` through every element and its loss channel.
    pub fn apply(&self, rho: &PhotonDensity) -> Result<PhotonDensity> {
        if rho.mode_count() != self.mode_count {
            return Err(Error::DimensionMismatch { expected: self.mode_count + 1, found: rho.dim() });
        }
        let mut out = rho.clone();
        for e in &self.elements {
            out.two_mode_in_place(e.mode_a, e.mode_b, &e.matrix())?;
            if self.loss_per_element > 0.0 {
                out.lose_in_place(e.mode_a, self.loss_per_element);
                out.lose_in_place(e.mode_b, self.loss_per_element);
            }
        }
        Ok(out)
    }

    /// Lossless action on photon-mode amplitudes.
    pub fn propagate(&self, amplitudes: &[C64]) -> Result<Vec<C64>> {
        if amplitudes.len() != self.mode_count {
            return Err(Error::DimensionMismatch { expected: self.mode_count, found: amplitudes.len() });
        }
        let mut v = amplitudes.to_vec();
        for e in &self.elements {
            let u = e.matrix();
            let (x, y) = (v[e.mode_a], v[e.mode_b]);
            v[e.mode_a] = u[0][0] * x + u[0][1] * y;
            v[e.mode_b] = u[1][0] * x + u[1][1] * y;
        }
        Ok(v)
    }

    /// Output mode populations (vacuum last) of `rho` sent through the
    /// network; equals `apply(rho)?.populations()`.
    ///
    /// A structured input is split by linearity into its coherent part and
    /// one basis state per diagonal entry, each propagated as an amplitude
    /// vector, so nothing dense is ever formed.
    pub fn output_populations(&self, rho: &PhotonDensity) -> Result<Vec<f64>> {
        if rho.mode_count() != self.mode_count {
            return Err(Error::DimensionMismatch { expected: self.mode_count + 1, found: rho.dim() });
        }
        let Some((coherent, diagonal)) = rho.structured_parts() else {
            return Ok(self.apply(rho)?.populations());
        };
        let n = self.mode_count;
        let mut pops = vec![0.0; n + 1];
        let mut accumulate = |amps: &[C64], weight: f64| {
            let out = self.propagate_lossy(amps);
            let mut photon = 0.0;
            for (p, a) in pops.iter_mut().zip(&out) {
                let w = weight * a.norm_sqr();
                *p += w;
                photon += w;
            }
            let input: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
            pops[n] += weight * input - photon;
        };
        accumulate(&coherent[..n], 1.0);
        let mut basis = vec![C64::new(0.0, 0.0); n];
        for (k, &d) in diagonal[..n].iter().enumerate().filter(|(_, d)| **d != 0.0) {
            basis[k] = C64::new(1.0, 0.0);
            accumulate(&basis, d);
            basis[k] = C64::new(0.0, 0.0);
        }
        pops[n] += coherent[n].norm_sqr() + diagonal[n];
        Ok(pops)
    }

    /// Photon-sector amplitudes after the network, conditioned on no loss
    /// event (norm shrinks by the survival probability).
    fn propagate_lossy(&self, amplitudes: &[C64]) -> Vec<C64> {
        let keep = (1.0 - self.loss_per_element).sqrt();
        let mut v = amplitudes.to_vec();
        for e in &self.elements {
            let u = e.matrix();
            let (x, y) = (v[e.mode_a], v[e.mode_b]);
            v[e.mode_a] = keep * (u[0][0] * x + u[0][1] * y);
            v[e.mode_b] = keep * (u[1][0] * x + u[1][1] * y);
        }
        v
    }

    /// Dense unitary of the lossless network.
    pub fn unitary(&self) -> Result<Unitary> {
        if self.mode_count > DENSE_MODE_LIMIT {
            return Err(Error::TooLargeForDense(self.mode_count));
        }
        let n = self.mode_count;
        let mut m = nalgebra::DMatrix::zeros(n, n);
        let mut column = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            column.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            column[j] = C64::new(1.0, 0.0);
            let image = self.propagate(&column)?;
            m.column_mut(j).copy_from_slice(&image);
        }
        Ok(Unitary::new_unchecked(m))
    }

    /// Detection vector for "photon is back in `input_mode`" after the
    /// mirrored return pass, pulled back to the midpoint.
    ///
    /// The return pass applies each element's inverse in reverse order, each
    /// followed by loss. In the Heisenberg picture the projector onto
    /// `input_mode` stays rank one under that map, so the return probability
    /// of any midpoint state `rho` is `⟨χ|rho|χ⟩` with the `χ` built here.
    fn return_vector(&self, input_mode: usize) -> Vec<C64> {
        let keep = (1.0 - self.loss_per_element).sqrt();
        let mut chi = vec![C64::new(0.0, 0.0); self.mode_count + 1];
        chi[input_mode] = C64::new(1.0, 0.0);
        for e in &self.elements {
            chi[e.mode_a] *= keep;
            chi[e.mode_b] *= keep;
            let u = e.matrix();
            let (x, y) = (chi[e.mode_a], chi[e.mode_b]);
            chi[e.mode_a] = u[0][0] * x + u[0][1] * y;
            chi[e.mode_b] = u[1][0] * x + u[1][1] * y;
        }
        chi
    }
}

fn check_iterations(iterations: u32) -> Result<()> {
    if iterations > MAX_ITERATIONS {
        return Err(Error::TooManyIterations { requested: iterations, limit: MAX_ITERATIONS });
    }
    Ok(())
}

/// The doubling cascade: iteration `j` splits every occupied mode `k < 2^j`
/// onto `k` and `k + 2^j`. After `iterations` rounds a photon injected in
/// mode 0 sits in `|W^(2^iterations)⟩`, having crossed exactly `iterations`
/// beamsplitters on every path.
pub fn build_w_network(iterations: u32) -> Result<OpticalNetwork> {
    check_iterations(iterations)?;
    let modes = 1usize << iterations;
    let mut elements = Vec::with_capacity(modes - 1);
    for j in 0..iterations {
        let half = 1usize << j;
        for k in 0..half {
            elements.push(BeamsplitterElement::balanced(k, k + half)?);
        }
    }
    OpticalNetwork::new(modes, elements, 0.0)
}

/// Butterfly network whose lossless unitary is the natural-order Walsh
/// transform: layer `j` mixes every pair `(k, k + 2^j)` with bit `j` of `k`
/// clear. Each mode crosses `iterations` elements.
pub fn build_certification_network(iterations: u32) -> Result<OpticalNetwork> {
    check_iterations(iterations)?;
    let modes = 1usize << iterations;
    let mut elements = Vec::with_capacity(modes / 2 * iterations as usize);
    for j in 0..iterations {
        let half = 1usize << j;
        for k in (0..modes).filter(|k| k & half == 0) {
            elements.push(BeamsplitterElement::balanced(k, k + half)?);
        }
    }
    OpticalNetwork::new(modes, elements, 0.0)
}

/// Injects one photon in `input_mode`, runs the network with its loss model
/// and then, if given, applies the discretization model across the full
/// network width.
pub fn run_network(network: &OpticalNetwork, input_mode: usize, ist: Option<&IstParams>) -> Result<PhotonDensity> {
    if input_mode >= network.mode_count() {
        return Err(Error::param("input_mode", format!("{input_mode} >= mode count {}", network.mode_count())));
    }
    let input = density_from_pure(&PurePathState::basis(network.mode_count(), input_mode)?);
    let out = network.apply(&input)?;
    Ok(match ist {
        Some(params) => ist_decoherence(&out, params, network.mode_count()),
        None => out,
    })
}

/// What happens to the photon between the outward and return passes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MidpointChannel {
    Identity,
    FullDephasing,
    Ist(IstParams),
}

impl MidpointChannel {
    /// `identity`, `full-dephase` or `ist` (which needs `params`).
    pub fn parse(label: &str, params: Option<IstParams>) -> Result<Self> {
        match (label, params) {
            ("identity", _) => Ok(MidpointChannel::Identity),
            ("full-dephase" | "full-dephasing", _) => Ok(MidpointChannel::FullDephasing),
            ("ist", Some(p)) => Ok(MidpointChannel::Ist(p)),
            ("ist", None) => Err(Error::param("channel", "`ist` channel needs IST parameters")),
            (other, _) => Err(Error::UnknownChannel(other.to_string())),
        }
    }

    pub fn label(&self) -> String {
        match self {
            MidpointChannel::Identity => "identity".into(),
            MidpointChannel::FullDephasing => "full-dephase".into(),
            MidpointChannel::Ist(p) => format!("ist:{}", p.model()),
        }
    }

    pub fn apply(&self, rho: &PhotonDensity, width: usize) -> PhotonDensity {
        match self {
            MidpointChannel::Identity => rho.clone(),
            MidpointChannel::FullDephasing => rho.dephased(0.0),
            MidpointChannel::Ist(p) => ist_decoherence(rho, p, width),
        }
    }
}

/// Probability that the photon, sent through the network, subjected to
/// `channel`, reflected and sent back, exits through `input_mode`.
pub fn return_probability(network: &OpticalNetwork, input_mode: usize, channel: &MidpointChannel) -> Result<f64> {
    let forward = run_network(network, input_mode, None)?;
    let midpoint = channel.apply(&forward, network.mode_count());
    let chi = network.return_vector(input_mode);
    Ok(midpoint.expectation(&chi)?.clamp(0.0, 1.0))
}
