//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::FRAC_PI_4;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use ptqkd_core::eve::r1_gate;
use ptqkd_core::{
    alpha_optimal, approach1_strategy, approach2_strategy, approach3_strategy, approach3_time, hermitian_strategy,
    simulate, sweep_alpha, sweep_eta, Bb84State, CptMetric, MeasurementPair, Metric, RunConfig, StrategySpec,
};
use serde_json::Value;

const MC_TOL: f64 = 0.002;
const N: u64 = 1_000_000;

struct Outcome {
    passed: bool,
    details: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self { passed: true, details: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: String) {
        self.passed &= ok;
        self.details.push(format!("{}{what}", if ok { "" } else { "[x] " }));
    }

    fn within(&mut self, label: &str, value: f64, target: f64, tol: f64) {
        self.check((value - target).abs() <= tol, format!("{label} = {value:.6} (target {target:.6} ± {tol:e})"));
    }

    fn faster_than(&mut self, label: &str, took: Duration, limit: Duration) {
        self.check(took < limit, format!("{label} took {:.2}s (limit {}s)", took.as_secs_f64(), limit.as_secs()));
    }
}

fn ptqkd(args: &[&str]) -> (Output, Duration) {
    let start = Instant::now();
    let out =
        Command::new(env!("CARGO_BIN_EXE_ptqkd")).args(args).env_remove("PTQKD_SEED").output().expect("binary runs");
    (out, start.elapsed())
}

fn spec(name: &str) -> StrategySpec {
    StrategySpec::from_name(name).unwrap().unwrap()
}

fn hermitian_baseline() -> Outcome {
    let mut o = Outcome::new();
    let exact = hermitian_strategy().unwrap().exact_figures().unwrap();
    o.check(exact.accuracy == 0.75, format!("exact accuracy = {}", exact.accuracy));
    let start = Instant::now();
    let stats = simulate(&RunConfig { qubits: N, ..RunConfig::with_strategy(spec("hermitian")) }).unwrap();
    o.faster_than("10^6-qubit run", start.elapsed(), Duration::from_secs(10));
    o.within("sampled accuracy", stats.eve_accuracy.unwrap().value, 0.75, MC_TOL);
    o.within("sifted QBER", stats.qber.unwrap().value, 0.25, MC_TOL);
    o
}

fn approach2() -> Outcome {
    let mut o = Outcome::new();
    let exact = approach2_strategy(FRAC_PI_4, 3.0 * FRAC_PI_4).unwrap().exact_figures().unwrap().accuracy;
    o.within("exact accuracy", exact, 5.0 / 6.0, 1e-12);
    let stats = simulate(&RunConfig { qubits: N, ..RunConfig::with_strategy(spec("approach2")) }).unwrap();
    o.within("sampled accuracy", stats.eve_accuracy.unwrap().value, 5.0 / 6.0, MC_TOL);
    o
}

fn approach3() -> Outcome {
    let mut o = Outcome::new();
    let a_opt = alpha_optimal();
    let below = [0.1, 0.3, 0.4, 0.427, a_opt - 1e-9];
    let above = [a_opt, a_opt + 1e-9, 0.43, 0.8, 1.4];
    let boundary_ok = below.iter().all(|&a| approach3_time(a, FRAC_PI_4, 1.0).is_err())
        && above.iter().all(|&a| approach3_time(a, FRAC_PI_4, 1.0).is_ok());
    o.check(boundary_ok, format!("evolution time infeasible below and feasible from alpha_opt = {a_opt:.9}"));
    let exact = approach3_strategy(a_opt, FRAC_PI_4).unwrap().exact_figures().unwrap().accuracy;
    o.within("exact accuracy at alpha_opt", exact, 5.0 / 6.0, 1e-9);

    let start = Instant::now();
    let cfg = RunConfig { qubits: 100_000, ..RunConfig::with_strategy(spec("approach3")) };
    let rows = sweep_alpha(0.3, 1.5, 60, &cfg).unwrap();
    o.faster_than("60-point sweep", start.elapsed(), Duration::from_secs(30));
    let feasible: Vec<_> = rows.iter().filter(|r| r.feasible).collect();
    let first = feasible.first().map(|r| (r.x, r.exact.unwrap()));
    let argmax = feasible.iter().max_by(|a, b| a.exact.partial_cmp(&b.exact).unwrap()).map(|r| r.x);
    o.check(
        first.map(|f| f.0) == argmax && rows.iter().all(|r| r.feasible == (r.x >= a_opt)),
        format!("curve maximum at smallest feasible grid alpha {:?}", first),
    );
    let at_14 = approach3_strategy(1.4, FRAC_PI_4).unwrap().exact_figures().unwrap().accuracy;
    o.check(
        at_14 < 5.0 / 6.0 && at_14 < first.map_or(0.0, |f| f.1),
        format!("exact accuracy at alpha = 1.4 is {at_14:.6} < 5/6"),
    );
    o
}

fn approach1() -> Outcome {
    let mut o = Outcome::new();
    let r1 = r1_gate();
    let (psi01, psi11) = (r1 * Bb84State::Psi01.vector(), r1 * Bb84State::Psi11.vector());
    let never_minus =
        (0..=30).all(|k| {
            let alpha = -1.5 + 0.1 * k as f64;
            let pair = MeasurementPair::from_states(Metric::Cpt(CptMetric::new(alpha).unwrap()), psi01, psi11).unwrap();
            pair.prob_plus(psi01).unwrap() == 1.0
        }) && approach1_strategy(1e-3).unwrap().branches()[0].prob_plus(Bb84State::Psi01.vector()).unwrap() == 1.0;
    o.check(never_minus, "P(-1 | psi01) = 0 exactly on alpha in [-1.5, 1.5] and at pi/2 - 1e-3".into());

    let (out, _) = ptqkd(&["run", "--strategy", "approach1", "--epsilon", "0.001", "--qubits", "1000000"]);
    let report: Value = serde_json::from_slice(&out.stdout).expect("JSON report");
    let results = &report["results"];
    o.within("unambiguous rate", results["unambiguous_rate"]["value"].as_f64().unwrap(), 0.25, MC_TOL);
    let exact = approach1_strategy(1e-3).unwrap().exact_figures().unwrap().accuracy;
    o.within("sampled accuracy vs enumeration", results["eve_accuracy"]["value"].as_f64().unwrap(), exact, MC_TOL);
    let listed = report["discrepancies"].as_array().is_some_and(|d| {
        d.iter().any(|e| e["quantity"] == "eve_accuracy" && (e["claimed"].as_f64().unwrap() - 5.0 / 6.0).abs() < 1e-12)
    });
    o.check(listed, "report lists the eve_accuracy discrepancy against the claimed 5*eta/6".into());
    o
}

fn efficiency_threshold() -> Outcome {
    let mut o = Outcome::new();
    for name in ["approach2", "approach3"] {
        let cfg = RunConfig { qubits: 100_000, ..RunConfig::with_strategy(spec(name)) };
        let sweep = sweep_eta(0.8, 1.0, 41, &cfg).unwrap();
        o.within(&format!("{name} eta* (exact)"), sweep.threshold.unwrap_or(f64::NAN), 0.9, 0.005);
        if let Some(t) = sweep.threshold_sampled {
            o.details.push(format!("{name} eta* (sampled) = {t:.4}"));
        }
    }
    o
}

fn algebraic_suite() -> Outcome {
    let mut o = Outcome::new();
    let (out, took) = ptqkd(&["verify", "--samples", "1000"]);
    o.faster_than("verify", took, Duration::from_secs(5));
    let text = String::from_utf8_lossy(&out.stdout);
    o.check(out.status.code() == Some(0), format!("exit status {:?}", out.status.code()));
    let failing: Vec<_> = text.lines().filter(|l| l.ends_with("FAIL")).collect();
    o.check(failing.is_empty(), format!("failing checks: {failing:?}"));
    for needle in [
        "[C, H] = 0",
        "C^2 = I",
        "[CPT, P] = 0",
        "P+ + P- = I",
        "CPT norm conserved",
        "Hermitian norm not conserved",
        "evolved metric",
        "fault injection",
        "Hadamard",
        "approach2 cos",
        "approach3 evolved",
        "singular-metric guard",
    ] {
        o.check(text.contains(needle), format!("runs `{needle}`"));
    }
    o
}

fn determinism() -> Outcome {
    let mut o = Outcome::new();
    let pairs: [&[&str]; 3] = [
        &["run", "--strategy", "approach3", "--qubits", "200000", "--eta", "0.95", "--seed", "7"],
        &["run", "--strategy", "hermitian", "--qubits", "100000", "--format", "csv"],
        &["sweep-alpha", "--steps", "20", "--qubits", "5000"],
    ];
    for args in pairs {
        let run = |w: &str| {
            let mut a = args.to_vec();
            a.extend(["--workers", w]);
            ptqkd(&a).0
        };
        let (one, four) = (run("1"), run("4"));
        o.check(
            one.status.success() && !one.stdout.is_empty() && one.stdout == four.stdout,
            format!("`{}` identical with 1 and 4 workers", args[..3].join(" ")),
        );
    }
    o
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 7] = [
        ("Hermitian baseline", hermitian_baseline),
        ("Approach 2 accuracy", approach2),
        ("Approach 3 feasibility and alpha curve", approach3),
        ("Approach 1 unambiguous rate and discrepancy", approach1),
        ("Efficiency threshold", efficiency_threshold),
        ("Algebraic suite", algebraic_suite),
        ("Determinism across worker counts", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let verdict = if outcome.passed { "PASS" } else { "FAIL" };
        println!("criterion {}: {verdict}  {name} ({:.1}s)", i + 1, start.elapsed().as_secs_f64());
        for d in &outcome.details {
            println!("    {d}");
        }
        failed += !outcome.passed as usize;
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
