//! How many runs separate two click distributions.
//!
//! Uses the Chernoff information `C = −min_λ ln Σ pᵢ^λ qᵢ^{1−λ}`: with equal
//! priors the likelihood-ratio decision after `n` i.i.d. samples errs with
//! probability at most `½·e^{−nC}`, so `n = ⌈ln(1/(1−confidence)) / C⌉`
//! runs reach the requested confidence.

use serde::Serialize;

use crate::{HarnessError, Result};

const NORM_TOL: f64 = 1e-9;
/// Below this the required run count exceeds ~10¹³ and the pair is
/// reported as indistinguishable.
const MIN_CHERNOFF: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistic {
    LikelihoodRatio,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistinguishabilityReport {
    pub hypothesis_a: String,
    pub hypothesis_b: String,
    /// `None` when the distributions cannot be told apart.
    pub runs_required: Option<u64>,
    pub confidence: f64,
    pub statistic: Statistic,
    pub chernoff_information: f64,
    pub total_variation: f64,
}

impl DistinguishabilityReport {
    pub fn indistinguishable(&self) -> bool {
        self.runs_required.is_none()
    }

    pub fn with_labels(mut self, a: impl Into<String>, b: impl Into<String>) -> Self {
        self.hypothesis_a = a.into();
        self.hypothesis_b = b.into();
        self
    }
}

fn check(dist: &[f64], name: &str) -> Result<()> {
    if let Some(x) = dist.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(HarnessError::config(format!("{name}: entry {x} is not a probability")));
    }
    let total: f64 = dist.iter().sum();
    if (total - 1.0).abs() > NORM_TOL {
        return Err(HarnessError::config(format!("{name}: sums to {total}, not 1")));
    }
    Ok(())
}

pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// `ln Σ pᵢ^λ qᵢ^{1−λ}` over the common support.
fn log_affinity(p: &[f64], q: &[f64], lambda: f64) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| a.powf(lambda) * b.powf(1.0 - lambda))
        .sum::<f64>()
        .ln()
}

/// Chernoff information and the minimizing λ. The log-affinity is convex
/// in λ, so golden-section search on [0, 1] finds the minimum; endpoints
/// are checked separately because the minimum can sit on the boundary.
pub fn chernoff_information(p: &[f64], q: &[f64]) -> (f64, f64) {
    let f = |l: f64| log_affinity(p, q, l);
    if f(0.5) == f64::NEG_INFINITY {
        return (f64::INFINITY, 0.5);
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0, 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-12 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    let (lambda, value) = [(0.0, f(0.0)), (1.0, f(1.0)), (mid, f(mid))]
        .into_iter()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap();
    ((-value).max(0.0), lambda)
}

/// Runs needed for a likelihood-ratio test to separate `dist_a` from
/// `dist_b` at `confidence`. Symmetric in the two distributions.
pub fn distinguish(dist_a: &[f64], dist_b: &[f64], confidence: f64) -> Result<DistinguishabilityReport> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(HarnessError::config(format!("confidence: {confidence} outside (0, 1)")));
    }
    if dist_a.len() != dist_b.len() {
        return Err(HarnessError::config(format!(
            "distributions have different lengths ({} vs {})",
            dist_a.len(),
            dist_b.len()
        )));
    }
    check(dist_a, "dist_a")?;
    check(dist_b, "dist_b")?;
    // fixed argument order keeps the search path, hence the result, symmetric
    let (p, q) = match dist_a.iter().zip(dist_b).map(|(a, b)| a.total_cmp(b)).find(|o| o.is_ne()) {
        Some(std::cmp::Ordering::Greater) => (dist_b, dist_a),
        _ => (dist_a, dist_b),
    };
    let (c, _) = chernoff_information(p, q);
    let runs_required = if c < MIN_CHERNOFF {
        None
    } else if c.is_infinite() {
        Some(1)
    } else {
        let n = ((1.0 / (1.0 - confidence)).ln() / c).ceil();
        Some(if n >= u64::MAX as f64 { u64::MAX } else { (n as u64).max(1) })
    };
    Ok(DistinguishabilityReport {
        hypothesis_a: "a".into(),
        hypothesis_b: "b".into(),
        runs_required,
        confidence,
        statistic: Statistic::LikelihoodRatio,
        chernoff_information: c,
        total_variation: total_variation(dist_a, dist_b),
    })
}
