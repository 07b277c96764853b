use std::path::{Path, PathBuf};

use istbench_core::bmv::{BmvParams, G_SI, HBAR_SI};
use istbench_core::ist::IstParams;
use istbench_core::optics::MAX_ITERATIONS;
use serde::{Deserialize, Serialize};

use crate::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Wstate,
    Certify,
    ReturnProb,
    Spdc,
    Bmv,
    Sweep,
}

impl ExperimentKind {
    /// Name used on the command line and as the config block key.
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Wstate => "wstate",
            ExperimentKind::Certify => "certify",
            ExperimentKind::ReturnProb => "return-prob",
            ExperimentKind::Spdc => "spdc",
            ExperimentKind::Bmv => "bmv",
            ExperimentKind::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// A scalar or a list in the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x.clone()],
            OneOrMany::Many(xs) => xs.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WstateBlock {
    pub iterations: OneOrMany<u32>,
    #[serde(default)]
    pub loss_per_element: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ist: Option<IstParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifyBlock {
    pub iterations: u32,
    #[serde(default)]
    pub loss_per_element: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ist: Option<IstParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReturnProbBlock {
    pub iterations: OneOrMany<u32>,
    /// `identity`, `full-dephase` or `ist`.
    pub channel: String,
    #[serde(default)]
    pub loss_per_element: f64,
    #[serde(default)]
    pub input_mode: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ist: Option<IstParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpdcBlock {
    pub sectors: OneOrMany<usize>,
    #[serde(default = "default_models")]
    pub models: Vec<String>,
}

fn default_models() -> Vec<String> {
    vec!["shared".into(), "independent".into()]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BmvBlock {
    #[serde(default = "default_mass")]
    pub m1_kg: f64,
    #[serde(default = "default_mass")]
    pub m2_kg: f64,
    #[serde(default = "default_d")]
    pub d_m: f64,
    #[serde(default = "default_dx")]
    pub delta_x_m: f64,
    #[serde(default = "default_g")]
    pub g_m3_per_kg_s2: f64,
    #[serde(default = "default_hbar")]
    pub hbar_j_s: f64,
    #[serde(default)]
    pub tau_start_s: f64,
    #[serde(default = "default_tau_stop")]
    pub tau_stop_s: f64,
    #[serde(default = "default_tau_steps")]
    pub tau_steps: usize,
}

fn default_mass() -> f64 {
    BmvParams::illustrative().m1_kg
}
fn default_d() -> f64 {
    BmvParams::illustrative().d_m
}
fn default_dx() -> f64 {
    BmvParams::illustrative().delta_x_m
}
fn default_g() -> f64 {
    G_SI
}
fn default_hbar() -> f64 {
    HBAR_SI
}
fn default_tau_stop() -> f64 {
    3.0
}
fn default_tau_steps() -> usize {
    301
}

impl BmvBlock {
    pub fn params(&self, tau_s: f64) -> istbench_core::Result<BmvParams> {
        let p = BmvParams {
            m1_kg: self.m1_kg,
            m2_kg: self.m2_kg,
            d_m: self.d_m,
            delta_x_m: self.delta_x_m,
            tau_s,
            g_m3_per_kg_s2: self.g_m3_per_kg_s2,
            hbar_j_s: self.hbar_j_s,
        };
        p.validate()?;
        Ok(p)
    }

    /// Evenly spaced τ grid, endpoints included.
    pub fn taus(&self) -> Vec<f64> {
        match self.tau_steps {
            0 => vec![],
            1 => vec![self.tau_start_s],
            n => {
                let h = (self.tau_stop_s - self.tau_start_s) / (n - 1) as f64;
                (0..n).map(|i| self.tau_start_s + h * i as f64).collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SweepBlock {
    /// Photon survival against register size.
    Survival {
        loss_per_element: f64,
        #[serde(default = "one")]
        min_iterations: u32,
        #[serde(default = "ten")]
        max_iterations: u32,
    },
    /// Return probability through the partial IST channel as γ varies.
    ReturnGamma {
        iterations: OneOrMany<u32>,
        #[serde(rename = "log2_N")]
        log2_n: f64,
        gammas: Vec<f64>,
        #[serde(default)]
        loss_per_element: f64,
    },
    /// Runs needed to tell standard and IST detector statistics apart.
    Distinguish {
        iterations: OneOrMany<u32>,
        ist: IstParams,
        #[serde(default)]
        loss_per_element: f64,
        #[serde(default = "default_confidence")]
        confidence: f64,
    },
}

fn one() -> u32 {
    1
}
fn ten() -> u32 {
    10
}
fn default_confidence() -> f64 {
    0.95
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentBlock {
    Wstate(WstateBlock),
    Certify(CertifyBlock),
    ReturnProb(ReturnProbBlock),
    Spdc(SpdcBlock),
    Bmv(BmvBlock),
    Sweep(SweepBlock),
}

impl ExperimentBlock {
    pub fn kind(&self) -> ExperimentKind {
        match self {
            ExperimentBlock::Wstate(_) => ExperimentKind::Wstate,
            ExperimentBlock::Certify(_) => ExperimentKind::Certify,
            ExperimentBlock::ReturnProb(_) => ExperimentKind::ReturnProb,
            ExperimentBlock::Spdc(_) => ExperimentKind::Spdc,
            ExperimentBlock::Bmv(_) => ExperimentKind::Bmv,
            ExperimentBlock::Sweep(_) => ExperimentKind::Sweep,
        }
    }

    fn to_json(&self) -> serde_json::Value {
        let v = match self {
            ExperimentBlock::Wstate(b) => serde_json::to_value(b),
            ExperimentBlock::Certify(b) => serde_json::to_value(b),
            ExperimentBlock::ReturnProb(b) => serde_json::to_value(b),
            ExperimentBlock::Spdc(b) => serde_json::to_value(b),
            ExperimentBlock::Bmv(b) => serde_json::to_value(b),
            ExperimentBlock::Sweep(b) => serde_json::to_value(b),
        };
        v.expect("config blocks serialize")
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDoc {
    experiment: Option<ExperimentKind>,
    seed: Option<u64>,
    #[serde(default)]
    runs: u64,
    #[serde(default)]
    format: Format,
    output: Option<PathBuf>,
    wstate: Option<WstateBlock>,
    certify: Option<CertifyBlock>,
    #[serde(rename = "return-prob")]
    return_prob: Option<ReturnProbBlock>,
    spdc: Option<SpdcBlock>,
    bmv: Option<BmvBlock>,
    sweep: Option<SweepBlock>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Monte Carlo runs per estimate; 0 disables sampling where optional.
    pub runs: u64,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub block: ExperimentBlock,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub experiment: Option<ExperimentKind>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

impl ExperimentConfig {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text, overrides).map_err(|e| match e {
            HarnessError::Config(msg) => HarnessError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str, overrides: &Overrides) -> Result<Self> {
        let doc: ConfigDoc = toml::from_str(text).map_err(|e| HarnessError::config(e.to_string().trim_end()))?;
        let mut blocks = Vec::new();
        if let Some(b) = doc.wstate {
            blocks.push(ExperimentBlock::Wstate(b));
        }
        if let Some(b) = doc.certify {
            blocks.push(ExperimentBlock::Certify(b));
        }
        if let Some(b) = doc.return_prob {
            blocks.push(ExperimentBlock::ReturnProb(b));
        }
        if let Some(b) = doc.spdc {
            blocks.push(ExperimentBlock::Spdc(b));
        }
        if let Some(b) = doc.bmv {
            blocks.push(ExperimentBlock::Bmv(b));
        }
        if let Some(b) = doc.sweep {
            blocks.push(ExperimentBlock::Sweep(b));
        }
        let block = match blocks.len() {
            1 => blocks.pop().unwrap(),
            0 => return Err(HarnessError::config("no experiment block ([wstate], [certify], [return-prob], [spdc], [bmv] or [sweep])")),
            _ => {
                let names: Vec<_> = blocks.iter().map(|b| format!("[{}]", b.kind().name())).collect();
                return Err(HarnessError::config(format!("exactly one experiment block allowed, found {}", names.join(", "))));
            }
        };
        for requested in [doc.experiment, overrides.experiment].into_iter().flatten() {
            if requested != block.kind() {
                return Err(HarnessError::config(format!(
                    "experiment: `{}` requested but the config holds a [{}] block",
                    requested.name(),
                    block.kind().name()
                )));
            }
        }
        let seed = overrides
            .seed
            .or(doc.seed)
            .ok_or_else(|| HarnessError::config("seed: missing (set it in the config or pass --seed)"))?;
        let cfg = ExperimentConfig {
            seed,
            runs: doc.runs,
            format: overrides.format.unwrap_or(doc.format),
            output: overrides.output.clone().or(doc.output),
            block,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn kind(&self) -> ExperimentKind {
        self.block.kind()
    }

    /// Canonical echo stored in every output. The output path is left out
    /// so the same run written to two places gives identical files.
    pub fn echo(&self) -> serde_json::Value {
        let mut m = serde_json::Map::new();
        m.insert("experiment".into(), self.kind().name().into());
        m.insert("seed".into(), self.seed.into());
        m.insert("runs".into(), self.runs.into());
        m.insert("format".into(), serde_json::to_value(self.format).unwrap());
        m.insert(self.kind().name().into(), self.block.to_json());
        serde_json::Value::Object(m)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, why: String| Err(HarnessError::config(format!("{}.{field}: {why}", self.kind().name())));
        let check_iterations = |field: &str, list: &[u32], min: u32| -> Result<()> {
            if list.is_empty() {
                return bad(field, "needs at least one value".into());
            }
            match list.iter().find(|&&i| i < min || i > MAX_ITERATIONS) {
                Some(i) => bad(field, format!("{i} outside {min}..={MAX_ITERATIONS}")),
                None => Ok(()),
            }
        };
        let check_loss = |p: f64| -> Result<()> {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                bad("loss_per_element", format!("{p} outside [0, 1]"))
            }
        };
        match &self.block {
            ExperimentBlock::Wstate(b) => {
                check_iterations("iterations", &b.iterations.to_vec(), 0)?;
                check_loss(b.loss_per_element)?;
            }
            ExperimentBlock::Certify(b) => {
                check_iterations("iterations", &[b.iterations], 1)?;
                check_loss(b.loss_per_element)?;
                if self.runs == 0 {
                    return Err(HarnessError::config("runs: certify samples detector clicks and needs runs >= 1"));
                }
            }
            ExperimentBlock::ReturnProb(b) => {
                check_iterations("iterations", &b.iterations.to_vec(), 0)?;
                check_loss(b.loss_per_element)?;
                istbench_core::optics::MidpointChannel::parse(&b.channel, b.ist)
                    .map_err(|e| HarnessError::config(format!("return-prob.channel: {e}")))?;
                if let Some(i) = b.iterations.to_vec().into_iter().find(|&i| b.input_mode >= 1usize << i) {
                    return bad("input_mode", format!("{} out of range for {} modes", b.input_mode, 1usize << i));
                }
            }
            ExperimentBlock::Spdc(b) => {
                let sectors = b.sectors.to_vec();
                if sectors.is_empty() {
                    return bad("sectors", "needs at least one value".into());
                }
                if let Some(m) = sectors.iter().find(|m| !m.is_power_of_two() || **m > 1 << 16) {
                    return bad("sectors", format!("{m} is not a power of two up to 65536"));
                }
                if b.models.is_empty() {
                    return bad("models", "needs at least one value".into());
                }
                if let Some(m) = b.models.iter().find(|m| parse_phase_model(m).is_none()) {
                    return bad("models", format!("unknown phase model `{m}` (shared | independent)"));
                }
                if self.runs == 0 {
                    return Err(HarnessError::config("runs: spdc averages over phase draws and needs runs >= 1"));
                }
            }
            ExperimentBlock::Bmv(b) => {
                if b.tau_steps == 0 {
                    return bad("tau_steps", "must be at least 1".into());
                }
                let ordered = b.tau_start_s.is_finite() && b.tau_stop_s.is_finite() && 0.0 <= b.tau_start_s && b.tau_start_s <= b.tau_stop_s;
                if !ordered {
                    return bad("tau_stop_s", format!("need 0 <= tau_start_s <= tau_stop_s, got {}..{}", b.tau_start_s, b.tau_stop_s));
                }
                b.params(b.tau_start_s).map_err(|e| HarnessError::config(format!("bmv: {e}")))?;
            }
            ExperimentBlock::Sweep(s) => match s {
                SweepBlock::Survival { loss_per_element, min_iterations, max_iterations } => {
                    check_loss(*loss_per_element)?;
                    if min_iterations > max_iterations || *min_iterations < 1 || *max_iterations > MAX_ITERATIONS {
                        return bad(
                            "max_iterations",
                            format!("need 1 <= min_iterations <= max_iterations <= {MAX_ITERATIONS}"),
                        );
                    }
                }
                SweepBlock::ReturnGamma { iterations, log2_n, gammas, loss_per_element } => {
                    check_iterations("iterations", &iterations.to_vec(), 0)?;
                    check_loss(*loss_per_element)?;
                    if gammas.is_empty() {
                        return bad("gammas", "needs at least one value".into());
                    }
                    for &g in gammas {
                        IstParams::partial(*log2_n, g).map_err(|e| HarnessError::config(format!("sweep: {e}")))?;
                    }
                }
                SweepBlock::Distinguish { iterations, loss_per_element, confidence, .. } => {
                    check_iterations("iterations", &iterations.to_vec(), 1)?;
                    check_loss(*loss_per_element)?;
                    if !(*confidence > 0.0 && *confidence < 1.0) {
                        return bad("confidence", format!("{confidence} outside (0, 1)"));
                    }
                }
            },
        }
        Ok(())
    }
}

pub(crate) fn parse_phase_model(label: &str) -> Option<istbench_core::optics::spdc::PhaseModel> {
    use istbench_core::optics::spdc::PhaseModel;
    match label {
        "shared" => Some(PhaseModel::Shared),
        "independent" => Some(PhaseModel::Independent),
        _ => None,
    }
}

/// Joins a relative output path onto `out_dir` when one is given.
pub fn resolve_output(path: &Path, out_dir: Option<&Path>) -> PathBuf {
    match out_dir {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.to_path_buf(),
    }
}
