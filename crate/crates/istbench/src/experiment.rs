use istbench_core::bmv::{evolve_bmv, entanglement_witness, sample_witness, Hypothesis};
use istbench_core::ist::{survival_probability, IstParams};
use istbench_core::optics::spdc::mean_correlation;
use istbench_core::optics::{
    build_certification_network, build_w_network, return_probability, run_network, sample_clicks, MidpointChannel,
};
use istbench_core::quantum::{fidelity_with_pure, Purity, PurePathState};
use istbench_core::rng;
use rayon::prelude::*;

use crate::config::{
    parse_phase_model, BmvBlock, CertifyBlock, ExperimentBlock, ExperimentConfig, ReturnProbBlock, SpdcBlock,
    SweepBlock, WstateBlock,
};
use crate::distinguish::distinguish;
use crate::table::{Provenance, ResultTable, Table, Value};
use crate::{HarnessError, Result, TOOL_NAME, TOOL_VERSION};

const DETECTOR_NOTE: &str = "detector k < M is Walsh row k of the certification butterfly; detector M means no click";

fn core_err(context: &str) -> impl Fn(istbench_core::Error) -> HarnessError + '_ {
    move |e| HarnessError::config(format!("{context}: {e}"))
}

/// Runs the configured experiment and returns its table with provenance.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultTable> {
    config.validate()?;
    let (table, notes) = match &config.block {
        ExperimentBlock::Wstate(b) => wstate(b)?,
        ExperimentBlock::Certify(b) => certify(b, config.runs, config.seed)?,
        ExperimentBlock::ReturnProb(b) => return_prob(b)?,
        ExperimentBlock::Spdc(b) => spdc(b, config.runs, config.seed)?,
        ExperimentBlock::Bmv(b) => bmv(b, config.runs, config.seed)?,
        ExperimentBlock::Sweep(s) => sweep(s)?,
    };
    Ok(ResultTable {
        provenance: Provenance {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            experiment: config.kind().name().into(),
            seed: config.seed,
            config: config.echo(),
            notes,
        },
        table,
    })
}

fn collect_rows<T, F>(items: Vec<T>, f: F) -> Result<Vec<Vec<Value>>>
where
    T: Send,
    F: Fn(usize, T) -> Result<Vec<Value>> + Sync,
{
    items.into_par_iter().enumerate().map(|(i, t)| f(i, t)).collect()
}

fn fill(mut table: Table, rows: Vec<Vec<Value>>) -> Table {
    rows.into_iter().for_each(|r| table.push(r));
    table
}

fn ist_note(ist: &Option<IstParams>) -> String {
    match ist {
        Some(p) => format!("IST model {} with log2_N = {}", p.model(), p.log2_n()),
        None => "standard quantum evolution (no IST model)".into(),
    }
}

fn wstate(b: &WstateBlock) -> Result<(Table, Vec<String>)> {
    let rows = collect_rows(b.iterations.to_vec(), |_, i| {
        let err = core_err("wstate");
        let net = build_w_network(i).map_err(&err)?.with_loss(b.loss_per_element).map_err(&err)?;
        let m = net.mode_count();
        let rho = run_network(&net, 0, b.ist.as_ref()).map_err(&err)?;
        let target = PurePathState::w_state(m).map_err(&err)?;
        let fidelity = fidelity_with_pure(&rho, &target).map_err(&err)?;
        Ok(vec![i.into(), m.into(), fidelity.into(), rho.photon_trace().into(), rho.purity().into()])
    })?;
    let table = fill(Table::new(["I", "M", "fidelity", "photon_trace", "purity"]), rows);
    Ok((table, vec![ist_note(&b.ist), "photon injected in mode 0".into()]))
}

fn certify(b: &CertifyBlock, runs: u64, seed: u64) -> Result<(Table, Vec<String>)> {
    let err = core_err("certify");
    let p = b.loss_per_element;
    let gen = build_w_network(b.iterations).map_err(&err)?.with_loss(p).map_err(&err)?;
    let cert = build_certification_network(b.iterations).map_err(&err)?.with_loss(p).map_err(&err)?;
    let rho = run_network(&gen, 0, b.ist.as_ref()).map_err(&err)?;
    let probs = cert.output_populations(&rho).map_err(&err)?;
    let counts = sample_clicks(&probs, runs, &mut rng::stream(seed, 0)).map_err(&err)?;
    let m = gen.mode_count();
    let mut table = Table::new(["detector", "outcome", "probability", "count", "frequency", "std_error"]);
    for (k, (&prob, &count)) in probs.iter().zip(&counts).enumerate() {
        let f = count as f64 / runs as f64;
        let se = (f * (1.0 - f) / runs as f64).sqrt();
        let outcome = if k < m { "click" } else { "none" };
        table.push(vec![k.into(), outcome.into(), prob.into(), count.into(), f.into(), se.into()]);
    }
    let notes = vec![
        DETECTOR_NOTE.into(),
        ist_note(&b.ist),
        "std_error = sqrt(f(1-f)/runs) for the sampled frequency".into(),
    ];
    Ok((table, notes))
}

fn return_prob(b: &ReturnProbBlock) -> Result<(Table, Vec<String>)> {
    let channel = MidpointChannel::parse(&b.channel, b.ist).map_err(core_err("return-prob.channel"))?;
    let rows = collect_rows(b.iterations.to_vec(), |_, i| {
        let err = core_err("return-prob");
        let net = build_w_network(i).map_err(&err)?.with_loss(b.loss_per_element).map_err(&err)?;
        let r = return_probability(&net, b.input_mode, &channel).map_err(&err)?;
        Ok(vec![i.into(), net.mode_count().into(), channel.label().into(), r.into(), 0.5f64.powi(i as i32).into()])
    })?;
    let table = fill(Table::new(["I", "M", "channel", "return_probability", "decoherent_limit"]), rows);
    Ok((table, vec!["return pass is the mirrored network with the same per-element loss".into()]))
}

fn spdc(b: &SpdcBlock, runs: u64, seed: u64) -> Result<(Table, Vec<String>)> {
    let mut cases = Vec::new();
    for m in b.sectors.to_vec() {
        for label in &b.models {
            cases.push((m, parse_phase_model(label).expect("validated")));
        }
    }
    let rows = collect_rows(cases, |i, (m, model)| {
        let (mean, se) =
            mean_correlation(m, model, runs, rng::child_seed(seed, i as u64)).map_err(core_err("spdc"))?;
        Ok(vec![m.into(), model.label().into(), mean.into(), se.into(), (1.0 / m as f64).into()])
    })?;
    let table = fill(Table::new(["M", "model", "mean_correlation", "std_error", "baseline"]), rows);
    let notes = vec![
        "correlation = probability that upper and lower detectors agree after full aperture combination".into(),
        "mean over `runs` independent phase draws; std_error is the standard error of that mean".into(),
    ];
    Ok((table, notes))
}

fn bmv(b: &BmvBlock, runs: u64, seed: u64) -> Result<(Table, Vec<String>)> {
    let mut columns: Vec<String> = ["tau", "witness_coherent", "witness_no_collapse", "witness_collapse"]
        .map(String::from)
        .to_vec();
    if runs > 0 {
        for h in Hypothesis::ALL {
            columns.push(format!("sampled_{}", h.label()));
            columns.push(format!("std_error_{}", h.label()));
        }
    }
    let rows = collect_rows(b.taus(), |i, tau| {
        let err = core_err("bmv");
        let params = b.params(tau).map_err(&err)?;
        let mut row: Vec<Value> = vec![tau.into()];
        let mut sampled = Vec::new();
        let row_seed = rng::child_seed(seed, i as u64);
        for (j, h) in Hypothesis::ALL.into_iter().enumerate() {
            let rho = evolve_bmv(&params, h).map_err(&err)?;
            row.push(entanglement_witness(&rho).into());
            if runs > 0 {
                let est = sample_witness(&rho, runs, rng::child_seed(row_seed, j as u64)).map_err(&err)?;
                sampled.push(est.estimate.into());
                sampled.push(est.std_error.into());
            }
        }
        row.extend(sampled);
        Ok(row)
    })?;
    let notes = vec![
        "witness = |<sx sz> - <sy sz>|, analytic; sampled columns use `runs` shots per measurement setting".into(),
        format!("masses {:e} kg / {:e} kg, separation {:e} m, split {:e} m", b.m1_kg, b.m2_kg, b.d_m, b.delta_x_m),
    ];
    Ok((fill(Table::new(columns), rows), notes))
}

fn sweep(s: &SweepBlock) -> Result<(Table, Vec<String>)> {
    match s {
        SweepBlock::Survival { loss_per_element, min_iterations, max_iterations } => {
            let p = *loss_per_element;
            let rows = collect_rows((*min_iterations..=*max_iterations).collect(), |_, i| {
                let err = core_err("sweep");
                let m = 1usize << i;
                Ok(vec![
                    m.into(),
                    i.into(),
                    survival_probability(p, m, false).map_err(&err)?.into(),
                    survival_probability(p, m, true).map_err(&err)?.into(),
                ])
            })?;
            let table = fill(Table::new(["M", "I", "survival", "survival_certify"]), rows);
            let note = format!("per-element loss {p}; certification adds I more elements per path");
            Ok((table, vec![note]))
        }
        SweepBlock::ReturnGamma { iterations, log2_n, gammas, loss_per_element } => {
            let mut cases = Vec::new();
            for i in iterations.to_vec() {
                for &g in gammas {
                    cases.push((i, g));
                }
            }
            let rows = collect_rows(cases, |_, (i, g)| {
                let err = core_err("sweep");
                let params = IstParams::partial(*log2_n, g).map_err(&err)?;
                let net = build_w_network(i).map_err(&err)?.with_loss(*loss_per_element).map_err(&err)?;
                let r = return_probability(&net, 0, &MidpointChannel::Ist(params)).map_err(&err)?;
                Ok(vec![i.into(), net.mode_count().into(), g.into(), r.into()])
            })?;
            let table = fill(Table::new(["I", "M", "gamma", "return_probability"]), rows);
            Ok((table, vec![format!("partial IST model, log2_N = {log2_n}")]))
        }
        SweepBlock::Distinguish { iterations, ist, loss_per_element, confidence } => {
            let label_b = format!("ist:{}", ist.model());
            let rows = collect_rows(iterations.to_vec(), |_, i| {
                let err = core_err("sweep");
                let p = *loss_per_element;
                let gen = build_w_network(i).map_err(&err)?.with_loss(p).map_err(&err)?;
                let cert = build_certification_network(i).map_err(&err)?.with_loss(p).map_err(&err)?;
                let qm = cert.output_populations(&run_network(&gen, 0, None).map_err(&err)?).map_err(&err)?;
                let alt = cert.output_populations(&run_network(&gen, 0, Some(ist)).map_err(&err)?).map_err(&err)?;
                let r = distinguish(&qm, &alt, *confidence)?.with_labels("qm", label_b.clone());
                Ok(vec![
                    i.into(),
                    gen.mode_count().into(),
                    r.hypothesis_a.clone().into(),
                    r.hypothesis_b.clone().into(),
                    r.total_variation.into(),
                    r.chernoff_information.into(),
                    r.runs_required.into(),
                    r.indistinguishable().into(),
                ])
            })?;
            let columns = [
                "I",
                "M",
                "hypothesis_a",
                "hypothesis_b",
                "total_variation",
                "chernoff_information",
                "runs_required",
                "indistinguishable",
            ];
            let notes = vec![
                DETECTOR_NOTE.into(),
                format!(
                    "likelihood-ratio test at confidence {confidence}; runs_required = ceil(ln(1/(1-confidence))/C), empty when indistinguishable"
                ),
                format!("IST model {} with log2_N = {}", ist.model(), ist.log2_n()),
            ];
            Ok((fill(Table::new(columns), rows), notes))
        }
    }
}
