mod common;

use common::*;
use istbench_core::ist::{discretize_bloch, ist_decoherence, max_entangled_qubits, min_n_for_qubits, IstParams};
use istbench_core::optics::{build_w_network, return_probability, run_network, MidpointChannel};
use istbench_core::quantum::PhotonDensity;
use istbench_core::rng;
use proptest::prelude::*;

fn models(log2_n: f64, gamma: f64) -> [IstParams; 2] {
    [IstParams::hard_cutoff(log2_n).unwrap(), IstParams::partial(log2_n, gamma).unwrap()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn decoherence_keeps_valid_density(seed in any::<u64>(), modes in 2usize..=64, log2_n in 0.5f64..6.0, gamma in 0.0f64..=1.0) {
        let mut g = rng::seeded(seed);
        let rho = PhotonDensity::from_matrix(random_density_matrix(&mut g, modes, 2)).unwrap();
        for params in models(log2_n, gamma) {
            let out = ist_decoherence(&rho, &params, modes);
            prop_assert!((out.trace() - 1.0).abs() < 1e-10);
            prop_assert!(min_eigenvalue(&out.to_matrix().unwrap()) > -1e-10);
        }
    }

    #[test]
    fn hard_cutoff_output_is_diagonal(seed in any::<u64>(), modes in 9usize..=32) {
        let mut g = rng::seeded(seed);
        let rho = PhotonDensity::from_matrix(random_density_matrix(&mut g, modes, 3)).unwrap();
        let out = ist_decoherence(&rho, &IstParams::hard_cutoff(8.0).unwrap(), modes);
        for i in 0..modes {
            for j in 0..modes {
                if i != j {
                    prop_assert_eq!(out.entry(i, j).norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn partial_model_limits(seed in any::<u64>(), modes in 9usize..=32) {
        let mut g = rng::seeded(seed);
        let rho = PhotonDensity::from_matrix(random_density_matrix(&mut g, modes, 2)).unwrap();
        let keep = ist_decoherence(&rho, &IstParams::partial(8.0, 1.0).unwrap(), modes).to_matrix().unwrap();
        prop_assert!((keep - rho.to_matrix().unwrap()).iter().all(|z| z.norm() < 1e-15));
        let zero = ist_decoherence(&rho, &IstParams::partial(8.0, 0.0).unwrap(), modes).to_matrix().unwrap();
        let hard = ist_decoherence(&rho, &IstParams::hard_cutoff(8.0).unwrap(), modes).to_matrix().unwrap();
        prop_assert!((zero - hard).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn snapping_is_idempotent(theta in -10.0f64..10.0, phi in -10.0f64..10.0, log2_n in 1.0f64..60.0) {
        let p = IstParams::hard_cutoff(log2_n).unwrap();
        let once = discretize_bloch(theta, phi, &p).unwrap();
        let twice = discretize_bloch(once.theta, once.phi, &p).unwrap();
        prop_assert_eq!(once, twice);
        if !once.finer_than_float {
            let half_step = std::f64::consts::PI / log2_n.exp2().round();
            // grid spacing near 2^-52 rad is comparable to one ulp of the angle
            let slack = |x: f64| half_step * (1.0 + 1e-12) + 4.0 * f64::EPSILON * x.abs();
            prop_assert!((once.theta - theta).abs() <= slack(theta));
            prop_assert!((once.phi - phi).abs() <= slack(phi));
        }
    }
}

#[test]
fn qubit_limit_round_trip() {
    for m in 1..=4096u64 {
        let p = IstParams::hard_cutoff(min_n_for_qubits(m).unwrap()).unwrap();
        assert_eq!(max_entangled_qubits(&p), m);
    }
}

#[test]
fn return_probability_monotone_in_gamma() {
    for i in 4..=10 {
        let net = build_w_network(i).unwrap();
        let floor = 0.5f64.powi(i as i32);
        let mut last = 0.0;
        for step in 0..=20 {
            let gamma = step as f64 / 20.0;
            let params = IstParams::partial(8.0, gamma).unwrap();
            let r = return_probability(&net, 0, &MidpointChannel::Ist(params)).unwrap();
            assert!(r >= last - 1e-12, "I={i} gamma={gamma}");
            assert!(r >= floor - 1e-12 && r <= 1.0 + 1e-12);
            if step > 0 && step < 20 {
                assert!(r > floor && r < 1.0);
            }
            last = r;
        }
    }
}

#[test]
fn w16_past_cutoff() {
    let net = build_w_network(4).unwrap();
    let hard = MidpointChannel::Ist(IstParams::hard_cutoff(8.0).unwrap());
    assert!((return_probability(&net, 0, &hard).unwrap() - 1.0 / 16.0).abs() < 1e-12);
    let partial = MidpointChannel::Ist(IstParams::partial(8.0, 0.5).unwrap());
    let r = return_probability(&net, 0, &partial).unwrap();
    // half the coherence survives: 0.5 + 0.5/16
    assert!((r - (0.5 + 0.5 / 16.0)).abs() < 1e-12);
    let rho = run_network(&net, 0, Some(&IstParams::partial(8.0, 0.5).unwrap())).unwrap();
    assert!((rho.entry(0, 5).re - 0.5 / 16.0).abs() < 1e-15);
}
