use std::f64::consts::FRAC_PI_4;

use ptqkd_core::bb84::transmit;
use ptqkd_core::montecarlo::{grid, write_alpha_csv};
use ptqkd_core::stream::qubit_rng;
use ptqkd_core::*;

fn within_4_sigma(sampled: f64, exact: f64, n: u64) -> bool {
    let sigma = (exact * (1.0 - exact) / n as f64).sqrt();
    (sampled - exact).abs() <= 4.0 * sigma.max(1.0 / n as f64)
}

fn shipped() -> Vec<StrategySpec> {
    StrategySpec::NAMES.iter().map(|n| StrategySpec::from_name(n).unwrap().unwrap()).collect()
}

#[test]
fn sampled_accuracy_tracks_enumeration() {
    for spec in shipped() {
        for eta in [1.0, 0.95, 0.9] {
            let cfg = RunConfig { eta, ..RunConfig::with_strategy(spec) };
            let stats = simulate(&cfg).unwrap();
            let acc = stats.eve_accuracy.unwrap();
            let exact = stats.exact_accuracy.unwrap();
            assert!(within_4_sigma(acc.value, exact, acc.n), "{spec} η={eta}: {} vs {exact}", acc.value);
            assert!(acc.lo <= acc.value && acc.value <= acc.hi);
            let qber = stats.qber.unwrap();
            assert!(within_4_sigma(qber.value, stats.exact_qber.unwrap(), qber.n), "{spec} η={eta} qber");
            let un = stats.unambiguous_rate.unwrap();
            assert!(
                within_4_sigma(un.value, stats.exact_unambiguous_rate.unwrap(), un.n),
                "{spec} η={eta} unambiguous"
            );
            assert_eq!(stats.eve_measurements, Some(stats.n));
        }
    }
}

#[test]
fn coin_fallback_and_loss_policies() {
    let spec = StrategySpec::from_name("approach2").unwrap().unwrap();
    let coin = RunConfig {
        eta: 0.9,
        fallback_policy: FallbackPolicy::Coin,
        qubits: 200_000,
        ..RunConfig::with_strategy(spec)
    };
    let s = simulate(&coin).unwrap();
    assert!((s.exact_accuracy.unwrap() - 0.80).abs() < 1e-12);
    assert!(within_4_sigma(s.eve_accuracy.unwrap().value, 0.80, s.eve_accuracy.unwrap().n));

    let loss = RunConfig { eta: 0.9, null_policy: NullPolicy::Loss, qubits: 200_000, ..RunConfig::with_strategy(spec) };
    let s = simulate(&loss).unwrap();
    assert!(within_4_sigma(s.lost as f64 / s.n as f64, 0.1, s.n));
    assert!(within_4_sigma(s.eve_accuracy.unwrap().value, 5.0 / 6.0, s.eve_accuracy.unwrap().n));
}

#[test]
fn no_eavesdropper_means_no_errors() {
    let stats = simulate(&RunConfig { qubits: 100_000, ..RunConfig::default() }).unwrap();
    assert_eq!(stats.qber.unwrap().hits, 0);
    assert!(stats.eve_accuracy.is_none() && stats.unambiguous_rate.is_none());
    let t = run_protocol(10_000, None, 3).unwrap();
    let k = sift(&t);
    assert_eq!(k.alice_key, k.bob_key);
}

#[test]
fn simulate_agrees_with_transcript_sifting() {
    let spec = StrategySpec::from_name("approach2").unwrap().unwrap();
    let cfg = RunConfig { qubits: 20_000, eta: 0.9, seed: 11, ..RunConfig::with_strategy(spec) };
    let stats = simulate(&cfg).unwrap();
    let strategy = cfg.build_strategy().unwrap().unwrap();
    let k = sift(&run_protocol(20_000, Some(&strategy), 11).unwrap());
    assert_eq!(stats.sifted as usize, k.alice_key.len());
    assert_eq!(stats.qber.unwrap().value, k.qber.unwrap());
    assert_eq!(stats.eve_accuracy.unwrap().value, k.eve_accuracy().unwrap());
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let spec = StrategySpec::from_name("approach3").unwrap().unwrap();
    let base = RunConfig { qubits: 50_000, eta: 0.95, ..RunConfig::with_strategy(spec) };
    let one = simulate(&RunConfig { workers: 1, ..base }).unwrap();
    let four = simulate(&RunConfig { workers: 4, ..base }).unwrap();
    assert_eq!(serde_json::to_string(&one).unwrap(), serde_json::to_string(&four).unwrap());

    let sweep = |workers| {
        let cfg = RunConfig { qubits: 2_000, workers, ..base };
        let mut out = Vec::new();
        write_alpha_csv(&sweep_alpha(0.3, 1.5, 13, &cfg).unwrap(), &mut out).unwrap();
        out
    };
    assert_eq!(sweep(1), sweep(3));
    assert_ne!(simulate(&RunConfig { seed: 43, ..base }).unwrap(), one);
}

#[test]
fn born_frequencies_match_probabilities() {
    let n = 100_000u64;
    let pair = approach2_strategy(FRAC_PI_4, 3.0 * FRAC_PI_4).unwrap().branches()[0];
    let cases = [
        (Basis::Computational.measurement(), encode(0, Basis::Diagonal)),
        (Basis::Diagonal.measurement(), StateVec::real(0.6, 0.8)),
        (pair.pair, pair.prep * Bb84State::Psi01.vector()),
        (pair.pair, pair.prep * Bb84State::Psi10.vector()),
    ];
    for (k, (m, state)) in cases.into_iter().enumerate() {
        let p = m.prob_plus(state).unwrap();
        let mut rng = qubit_rng(99, k as u64);
        let hits = (0..n).filter(|_| m.measure(state, &mut rng).unwrap().0 == Outcome::Plus).count();
        assert!(within_4_sigma(hits as f64 / n as f64, p, n), "case {k}: {hits} vs p={p}");
    }
    let mut rng = qubit_rng(5, 0);
    let state = StateVec::real(0.8, 0.6);
    let zeros = (0..n).filter(|_| measure_in_basis(state, Basis::Computational, &mut rng).unwrap().0 == 0).count();
    assert!(within_4_sigma(zeros as f64 / n as f64, 0.64, n));
}

#[test]
fn invert_resend_on_psi00_reaches_bob_intact() {
    // Only ψ00 sent in the computational basis and read by Bob in the same basis.
    let strategy = approach2_strategy(FRAC_PI_4, 3.0 * FRAC_PI_4).unwrap();
    let mut checked = 0;
    for i in 0..20_000 {
        let r = transmit(i, 8, Some(&strategy)).unwrap();
        if r.a == 0 && r.b == 0 && r.c == 0 {
            assert_eq!(r.bob, 0);
            assert_eq!(r.eve_bit, Some(0));
            checked += 1;
        }
    }
    assert!(checked > 2_000);
}

#[test]
fn alpha_sweep_shape() {
    let spec = StrategySpec::from_name("approach3").unwrap().unwrap();
    let cfg = RunConfig { qubits: 5_000, ..RunConfig::with_strategy(spec) };
    let rows = sweep_alpha(0.3, 1.5, 60, &cfg).unwrap();
    let a_opt = alpha_optimal();
    for r in &rows {
        assert_eq!(r.feasible, r.x >= a_opt, "α={}", r.x);
        assert_eq!(r.feasible, approach3_time(r.x, FRAC_PI_4, 1.0).is_ok());
        if !r.feasible {
            assert!(r.tau.is_none() && r.exact.is_none());
        }
    }
    let feasible: Vec<_> = rows.iter().filter(|r| r.feasible).collect();
    let first = feasible[0].exact.unwrap();
    assert!(feasible.iter().all(|r| r.exact.unwrap() <= first));
    // The 60-point grid first lands 0.0061 above α_opt.
    assert!((first - 5.0 / 6.0).abs() < 3e-3, "{first}");
    let last = rows.last().unwrap().exact.unwrap();
    assert!(last < 5.0 / 6.0);

    let fine = sweep_alpha(a_opt, a_opt + 0.01, 11, &RunConfig { qubits: 100, ..cfg }).unwrap();
    assert!((fine[1].exact.unwrap() - 5.0 / 6.0).abs() < 1e-3);
    assert!(grid(0.3, 1.5, 60).unwrap().iter().any(|&x| x > a_opt && x - a_opt < 0.021));
}

#[test]
fn eta_sweep_threshold() {
    for name in ["approach2", "approach3"] {
        let spec = StrategySpec::from_name(name).unwrap().unwrap();
        let cfg = RunConfig { qubits: 20_000, ..RunConfig::with_strategy(spec) };
        let sweep = sweep_eta(0.8, 1.0, 21, &cfg).unwrap();
        assert!((sweep.threshold.unwrap() - 0.9).abs() < 0.005, "{name}: {:?}", sweep.threshold);
        let top = sweep.rows.last().unwrap();
        assert!((top.exact.unwrap() - 5.0 / 6.0).abs() < 1e-9);
    }
    let spec = StrategySpec::from_name("approach2").unwrap().unwrap();
    let zero = sweep_eta(0.0, 1.0, 2, &RunConfig { qubits: 1_000, ..RunConfig::with_strategy(spec) }).unwrap();
    assert_eq!(zero.rows[0].exact, Some(0.0));
    assert_eq!(zero.rows[0].sampled, Some(0.0));
}
