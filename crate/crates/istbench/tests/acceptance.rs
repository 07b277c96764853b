//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::f64::consts::SQRT_2;
use std::process::{Command, ExitCode};
use std::time::Instant;

use istbench::config::Overrides;
use istbench::{render, run_experiment, ExperimentConfig, Format, Value};
use istbench_core::bmv::{
    bmv_phases, entanglement_witness, evolve_bmv, max_coherent_witness, sample_witness, BmvParams, Hypothesis,
};
use istbench_core::ist::{max_entangled_qubits, min_n_for_qubits, survival_probability, IstParams};
use istbench_core::optics::spdc::{combine_apertures, correlation_score, make_double_w, mean_correlation, PhaseModel};
use istbench_core::optics::{
    build_certification_network, build_w_network, certification_transform, detector_distribution, return_probability,
    run_network, walsh_pattern_state, walsh_row_of, MidpointChannel, FOUR_MODE_PATTERNS,
};
use istbench_core::quantum::{density_from_pure, fidelity_with_pure, PhotonDensity, PurePathState};
use istbench_core::C64;

const FIDELITY_TOL: f64 = 1e-10;
const W_RUNTIME_S: f64 = 10.0;
const SURVIVAL_TOL: f64 = 1e-6;
const SURVIVAL_1024: f64 = 0.990045;
const SURVIVAL_1024_CERTIFY: f64 = 0.980189;
/// The sweep must agree with the closed form to floating-point rounding.
const SWEEP_ULPS: f64 = 4.0;
const RETURN_TOL: f64 = 1e-10;
const DETECTOR_TOL: f64 = 1e-10;
const CUTOFF_TOL: f64 = 1e-10;
const CORRELATION_TOL: f64 = 1e-10;
const WITNESS_ZERO_TOL: f64 = 1e-12;
const BRUTE_TOL: f64 = 1e-12;
const ORACLE_TOL: f64 = 1e-12;
const SIGMAS: f64 = 3.0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn w_state_generation() -> Outcome {
    let start = Instant::now();
    let mut worst = f64::INFINITY;
    for i in 1..=12 {
        let net = build_w_network(i).unwrap();
        let rho = run_network(&net, 0, None).unwrap();
        let f = fidelity_with_pure(&rho, &PurePathState::w_state(1 << i).unwrap()).unwrap();
        worst = worst.min(f);
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst >= 1.0 - FIDELITY_TOL && secs < W_RUNTIME_S,
        format!("min fidelity over I=1..12 = {worst:.15}, runtime {secs:.3} s"),
    )
}

fn survival_law() -> Outcome {
    let p = 0.001;
    let plain = survival_probability(p, 1024, false).unwrap();
    let cert = survival_probability(p, 1024, true).unwrap();
    let mut ok = (plain - SURVIVAL_1024).abs() <= SURVIVAL_TOL && (cert - SURVIVAL_1024_CERTIFY).abs() <= SURVIVAL_TOL;

    let cfg = ExperimentConfig::parse(
        "seed = 0\n[sweep]\nkind = \"survival\"\nloss_per_element = 0.001\nmin_iterations = 1\nmax_iterations = 10\n",
        &Overrides::default(),
    )
    .unwrap();
    let table = run_experiment(&cfg).unwrap().table;
    ok &= table.columns() == ["M", "I", "survival", "survival_certify"] && table.rows().len() == 10;
    let mut worst_sim = 0.0f64;
    let mut worst_rel = 0.0f64;
    for row in table.rows() {
        let (Value::Int(m), Value::Int(i)) = (&row[0], &row[1]) else { return outcome(false, "bad row types") };
        let expected = (1.0 - p).powf((*m as f64).log2());
        let expected_cert = (1.0 - p).powf(2.0 * (*m as f64).log2());
        let (s, sc) = (row[2].as_f64().unwrap(), row[3].as_f64().unwrap());
        worst_rel = worst_rel.max(((s - expected) / expected).abs()).max(((sc - expected_cert) / expected_cert).abs());
        // the simulated networks lose exactly the same weight
        let gen = build_w_network(*i as u32).unwrap().with_loss(p).unwrap();
        let rho = run_network(&gen, 0, None).unwrap();
        let cert_net = build_certification_network(*i as u32).unwrap().with_loss(p).unwrap();
        let pops = cert_net.output_populations(&rho).unwrap();
        let detected: f64 = pops[..pops.len() - 1].iter().sum();
        worst_sim = worst_sim.max((rho.photon_trace() - expected).abs()).max((detected - expected_cert).abs());
    }
    ok &= worst_sim <= 1e-12 && worst_rel <= SWEEP_ULPS * f64::EPSILON;
    outcome(
        ok,
        format!(
            "M=1024: {plain:.6} / certify {cert:.6}; 10-row sweep vs (1-p)^log2 M max relative error {worst_rel:.1e}, network simulation within {worst_sim:.1e}"
        ),
    )
}

fn return_dichotomy() -> Outcome {
    let mut ok = true;
    let mut worst = 0.0f64;
    for i in 1..=12 {
        let net = build_w_network(i).unwrap();
        let id = return_probability(&net, 0, &MidpointChannel::Identity).unwrap();
        let deph = return_probability(&net, 0, &MidpointChannel::FullDephasing).unwrap();
        worst = worst.max((id - 1.0).abs()).max((deph - 0.5f64.powi(i as i32)).abs());
    }
    ok &= worst <= RETURN_TOL;
    let gammas: Vec<f64> = (1..10).map(|k| k as f64 / 10.0).collect();
    let mut monotone = true;
    for i in 3..=12 {
        let net = build_w_network(i).unwrap();
        let floor = 0.5f64.powi(i as i32);
        let mut last = floor;
        for &g in &gammas {
            let ch = MidpointChannel::Ist(IstParams::partial(4.0, g).unwrap());
            let r = return_probability(&net, 0, &ch).unwrap();
            monotone &= r > last && r < 1.0;
            last = r;
        }
    }
    ok &= monotone;
    outcome(
        ok,
        format!("identity/dephase max error {worst:.1e} over I=1..12; partial model strictly between and increasing in gamma: {monotone}"),
    )
}

fn certification() -> Outcome {
    let mut ok = true;
    let t4 = certification_transform(4).unwrap();
    let mut hit = Vec::new();
    for pattern in FOUR_MODE_PATTERNS {
        let amps: Vec<C64> = pattern.iter().map(|s| C64::new(s / 2.0, 0.0)).collect();
        let rho = density_from_pure(&PurePathState::from_photon_amplitudes(&amps).unwrap());
        let probs = detector_distribution(&rho, &t4).unwrap();
        let (best, p) = probs.iter().cloned().enumerate().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
        ok &= (p - 1.0).abs() <= DETECTOR_TOL && best < 4;
        hit.push(best);
    }
    let mut sorted = hit.clone();
    sorted.sort();
    sorted.dedup();
    ok &= sorted.len() == 4;
    let mixed = detector_distribution(&PhotonDensity::maximally_mixed(4).unwrap(), &t4).unwrap();
    ok &= mixed[..4].iter().all(|p| (p - 0.25).abs() <= DETECTOR_TOL);
    for m in [8usize, 16] {
        let t = certification_transform(m).unwrap();
        let cert = build_certification_network(m.trailing_zeros()).unwrap();
        for row in 0..m {
            let state = walsh_pattern_state(m, row).unwrap();
            let signs: Vec<f64> = state.photon_amplitudes().iter().map(|a| a.re.signum()).collect();
            ok &= walsh_row_of(&signs) == Some(row);
            // orthogonality by brute force against every other pattern
            for other in 0..m {
                let ip = state.inner(&walsh_pattern_state(m, other).unwrap()).unwrap().norm();
                ok &= (ip - if other == row { 1.0 } else { 0.0 }).abs() <= DETECTOR_TOL;
            }
            let rho = density_from_pure(&state);
            for probs in [detector_distribution(&rho, &t).unwrap(), cert.output_populations(&rho).unwrap()] {
                ok &= (probs[row] - 1.0).abs() <= DETECTOR_TOL;
            }
        }
    }
    outcome(ok, format!("M=4 patterns -> detectors {hit:?}; mixed -> {:.12} each; M=8,16 Walsh rows verified", mixed[0]))
}

fn ist_cutoff() -> Outcome {
    let params = IstParams::hard_cutoff(8.0).unwrap();
    let ch = MidpointChannel::Ist(params);
    let r4 = return_probability(&build_w_network(4).unwrap(), 0, &ch).unwrap();
    let r3 = return_probability(&build_w_network(3).unwrap(), 0, &ch).unwrap();
    let mut round_trip = true;
    for m in 1..=4096u64 {
        let p = IstParams::hard_cutoff(min_n_for_qubits(m).unwrap()).unwrap();
        round_trip &= max_entangled_qubits(&p) == m;
    }
    let limits = (max_entangled_qubits(&params), istbench_core::ist::max_iterations(&params).unwrap());
    let ok = (r4 - 1.0 / 16.0).abs() <= CUTOFF_TOL && (r3 - 1.0).abs() <= CUTOFF_TOL && round_trip && limits == (8, 3);
    outcome(ok, format!("N=2^8 limits {limits:?}; I=4 -> {r4}, I=3 -> {r3}; round trip 1..4096: {round_trip}"))
}

fn spdc() -> Outcome {
    let mut ok = true;
    let mut worst = 0.0f64;
    for m in [4usize, 8] {
        for seed in 0..100u64 {
            let (_, dist) = combine_apertures(&make_double_w(m, seed).unwrap(), m.trailing_zeros()).unwrap();
            worst = worst.max((correlation_score(&dist) - 1.0).abs());
        }
    }
    ok &= worst <= CORRELATION_TOL;
    let mut detail = format!("shared max deviation {worst:.1e}");
    for m in [4usize, 8] {
        let (mean, se) = mean_correlation(m, PhaseModel::Independent, 10_000, 31).unwrap();
        let z = (mean - 1.0 / m as f64) / se;
        ok &= z.abs() <= SIGMAS;
        detail.push_str(&format!("; independent M={m}: {mean:.5} ± {se:.5} (z = {z:.2})"));
    }
    outcome(ok, detail)
}

/// Witness from the phases by explicit 4×4 contraction, written out
/// independently of the library's state construction.
fn brute_witness(p: &BmvParams) -> f64 {
    let k = p.g_m3_per_kg_s2 * p.m1_kg * p.m2_kg * p.tau_s / p.hbar_j_s;
    let phi = k / p.d_m;
    let a = k / (p.d_m + p.delta_x_m) - phi;
    let b = k / (p.d_m - p.delta_x_m) - phi;
    let psi = [C64::new(0.5, 0.0), C64::from_polar(0.5, a), C64::from_polar(0.5, b), C64::new(0.5, 0.0)];
    let (o, z, i) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 1.0));
    let sx = [[z, o], [o, z]];
    let sy = [[z, -i], [i, z]];
    let sz = [[o, z], [z, -o]];
    let corr = |s1: [[C64; 2]; 2]| {
        let mut total = C64::new(0.0, 0.0);
        for r in 0..4 {
            for c in 0..4 {
                total += psi[r].conj() * s1[r / 2][c / 2] * sz[r % 2][c % 2] * psi[c];
            }
        }
        total.re
    };
    (corr(sx) - corr(sy)).abs()
}

fn bmv() -> Outcome {
    let base = BmvParams::illustrative();
    let taus: Vec<f64> = (0..=3000).map(|k| k as f64 * 1e-3).collect();
    let mut zero = 0.0f64;
    for &tau in taus.iter().step_by(25) {
        let p = base.with_tau(tau).unwrap();
        for h in [Hypothesis::DecoherentNoCollapse, Hypothesis::DecoherentCollapse] {
            zero = zero.max(entanglement_witness(&evolve_bmv(&p, h).unwrap()));
        }
    }
    let (tau_max, w_max) = max_coherent_witness(&base, &taus).unwrap();
    let p = base.with_tau(tau_max).unwrap();
    let brute = brute_witness(&p);
    let phases = bmv_phases(&p).unwrap();
    let rho = evolve_bmv(&p, Hypothesis::CoherentGravity).unwrap();
    let est = sample_witness(&rho, 1_000_000, 2024).unwrap();
    let z = (est.estimate - w_max) / est.std_error;
    let ok = zero <= WITNESS_ZERO_TOL
        && w_max > 1.0
        && w_max <= SQRT_2
        && (w_max - brute).abs() <= BRUTE_TOL
        && z.abs() <= SIGMAS;
    outcome(
        ok,
        format!(
            "decoherent max {zero:.1e}; coherent max W = {w_max:.6} at tau = {tau_max:.3} s (brute force {brute:.6}, dphi = {:.3}/{:.3}); 10^6-run estimate {:.5} ± {:.5} (z = {z:.2})",
            phases.delta_phi_lr, phases.delta_phi_rl, est.estimate, est.std_error
        ),
    )
}

type Dense = Vec<Vec<C64>>;

fn zeros(n: usize) -> Dense {
    vec![vec![C64::new(0.0, 0.0); n]; n]
}

fn identity(n: usize) -> Dense {
    (0..n).map(|i| (0..n).map(|j| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect()).collect()
}

fn mul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut c = zeros(n);
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

fn dagger(a: &Dense) -> Dense {
    let n = a.len();
    let mut d = zeros(n);
    for i in 0..n {
        for j in 0..n {
            d[i][j] = a[j][i].conj();
        }
    }
    d
}

fn conjugate(op: &Dense, rho: &Dense) -> Dense {
    mul(&mul(op, rho), &dagger(op))
}

/// Full-matrix reference: embeds every 50:50 element as an `(M+1)²`
/// unitary and applies loss through explicit Kraus operators.
fn naive_network(iterations: u32, p: f64, input: usize) -> Dense {
    let m = 1usize << iterations;
    let n = m + 1;
    let mut rho = zeros(n);
    rho[input][input] = C64::new(1.0, 0.0);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..iterations {
        let half = 1usize << j;
        for k in 0..half {
            let (a, b) = (k, k + half);
            let mut u = identity(n);
            u[a][a] = C64::new(h, 0.0);
            u[a][b] = C64::new(h, 0.0);
            u[b][a] = C64::new(h, 0.0);
            u[b][b] = C64::new(-h, 0.0);
            rho = conjugate(&u, &rho);
            for mode in [a, b] {
                let mut k0 = identity(n);
                k0[mode][mode] = C64::new((1.0 - p).sqrt(), 0.0);
                let mut k1 = zeros(n);
                k1[m][mode] = C64::new(p.sqrt(), 0.0);
                let (r0, r1) = (conjugate(&k0, &rho), conjugate(&k1, &rho));
                for r in 0..n {
                    for c in 0..n {
                        rho[r][c] = r0[r][c] + r1[r][c];
                    }
                }
            }
        }
    }
    rho
}

fn oracle_equivalence() -> Outcome {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for i in 0..=3u32 {
        for p in [0.0, 0.001, 0.25] {
            for input in 0..1usize << i {
                let fast = run_network(&build_w_network(i).unwrap().with_loss(p).unwrap(), input, None).unwrap();
                let slow = naive_network(i, p, input);
                for (r, row) in slow.iter().enumerate() {
                    for (c, x) in row.iter().enumerate() {
                        worst = worst.max((fast.entry(r, c) - x).norm());
                    }
                }
                cases += 1;
            }
        }
    }
    outcome(worst <= ORACLE_TOL, format!("{cases} cases, max entrywise difference {worst:.1e}"))
}

const REPRO_CONFIGS: [(&str, &str); 7] = [
    ("wstate", "seed = 1\n[wstate]\niterations = [1, 4, 8]\nloss_per_element = 0.01\nist = { log2_N = 5.0, model = \"partial\", gamma = 0.7 }\n"),
    ("certify", "seed = 7\nruns = 20000\n[certify]\niterations = 4\nloss_per_element = 0.02\nist = { log2_N = 3.0 }\n"),
    ("return-prob", "seed = 3\n[return-prob]\niterations = [2, 6, 10]\nchannel = \"ist\"\nist = { log2_N = 8.0, model = \"partial\", gamma = 0.5 }\n"),
    ("spdc", "seed = 5\nruns = 500\n[spdc]\nsectors = [4, 8, 16]\n"),
    ("bmv", "seed = 11\nruns = 5000\n[bmv]\ntau_steps = 24\n"),
    ("sweep", "seed = 2\n[sweep]\nkind = \"return-gamma\"\niterations = [4, 5]\nlog2_N = 8.0\ngammas = [0.2, 0.6]\n"),
    ("sweep", "seed = 4\n[sweep]\nkind = \"distinguish\"\niterations = [2, 4]\nloss_per_element = 0.001\nist = { log2_N = 8.0 }\n"),
];

fn reproducibility() -> Outcome {
    let mut ok = true;
    let mut bad = Vec::new();
    for (kind, text) in REPRO_CONFIGS {
        let cfg = ExperimentConfig::parse(text, &Overrides::default()).unwrap();
        for format in [Format::Csv, Format::Json] {
            let a = render(&run_experiment(&cfg).unwrap(), format);
            let b = render(&run_experiment(&cfg).unwrap(), format);
            if a != b {
                ok = false;
                bad.push(format!("{kind}/{format:?}"));
            }
        }
    }
    // and through the binary, writing files
    let dir = tempfile::tempdir().unwrap();
    for (n, (kind, text)) in REPRO_CONFIGS.iter().enumerate() {
        let cfg = dir.path().join(format!("c{n}.toml"));
        std::fs::write(&cfg, text).unwrap();
        let mut outputs = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("c{n}_{run}.csv"));
            let status = Command::new(env!("CARGO_BIN_EXE_istbench"))
                .args([kind, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
                .env_remove(istbench::OUT_DIR_ENV)
                .status()
                .unwrap();
            ok &= status.success();
            outputs.push(std::fs::read(&out).unwrap_or_default());
        }
        if outputs[0] != outputs[1] || outputs[0].is_empty() {
            ok = false;
            bad.push(format!("cli {kind}"));
        }
    }
    let detail = if bad.is_empty() {
        format!("{} configs x 2 formats in-process and via the CLI: identical bytes", REPRO_CONFIGS.len())
    } else {
        format!("differences in {bad:?}")
    };
    outcome(ok, detail)
}

fn main() -> ExitCode {
    type Check = fn() -> Outcome;
    let criteria: [(&str, Check); 9] = [
        ("W-state generation", w_state_generation),
        ("survival law", survival_law),
        ("return-probability dichotomy", return_dichotomy),
        ("certification", certification),
        ("IST cutoff", ist_cutoff),
        ("SPDC correlations", spdc),
        ("BMV witness", bmv),
        ("oracle equivalence", oracle_equivalence),
        ("reproducibility", reproducibility),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let o = std::panic::catch_unwind(check).unwrap_or_else(|_| outcome(false, "panicked"));
        println!("acceptance {}: {} {}: {}", n + 1, if o.pass { "PASS" } else { "FAIL" }, name, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance summary: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
