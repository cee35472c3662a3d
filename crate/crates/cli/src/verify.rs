//! Randomized algebraic self-checks behind `ptqkd verify`.

use std::f64::consts::{FRAC_PI_4, PI};

use ptqkd_core::eve::{approach3_strategy, r1_gate};
use ptqkd_core::stream::qubit_rng;
use ptqkd_core::{
    alpha_of, alpha_optimal, approach2_strategy, approach3_time, c_operator, cpt_cosine, cpt_inner, cpt_projector,
    encode, evolution_operator, evolved_metric, herm_inner, herm_projector, mat_apply, omega_of, ApproxEq, Basis,
    Bb84State, Complex, CptMetric, Error, Mat2, MeasurementPair, Metric, PtParams, StateVec,
};
use rand::Rng;
use serde::Serialize;

pub const DEFAULT_SAMPLES: usize = 1000;
pub const TOLERANCE: f64 = 1e-10;
/// Just short of π/2, inside the singular-metric guard.
#[allow(clippy::approx_constant)]
pub const GUARD_PROBE: f64 = 1.570_796_3;

/// Outcome of one named check.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub samples: usize,
    /// Largest deviation seen, or the witnessed gap for checks that must fail.
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn identity(name: &'static str, samples: usize, measured: f64) -> Self {
        Self { name, samples, measured, tolerance: TOLERANCE, passed: measured <= TOLERANCE, detail: String::new() }
    }

    /// Passes when `measured` exceeds `threshold`.
    fn witness(name: &'static str, samples: usize, measured: f64, threshold: f64, detail: &str) -> Self {
        Self { name, samples, measured, tolerance: threshold, passed: measured > threshold, detail: detail.into() }
    }
}

fn complex(rng: &mut impl Rng) -> Complex {
    Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn state(rng: &mut impl Rng) -> StateVec {
    loop {
        let v = StateVec::new(complex(rng), complex(rng));
        if v.norm_sqr() > 1e-3 {
            return v;
        }
    }
}

fn matrix(rng: &mut impl Rng) -> Mat2 {
    Mat2::new(complex(rng), complex(rng), complex(rng), complex(rng))
}

/// Unbroken-phase parameters with `|α| ≤ asin 0.95`.
fn params(rng: &mut impl Rng) -> PtParams {
    let s = rng.random_range(0.2..3.0);
    let k: f64 = rng.random_range(-0.95..0.95);
    let theta = rng.random_range(0.1..PI - 0.1) * if rng.random::<bool>() { 1.0 } else { -1.0 };
    PtParams::new(k * s / f64::sin(theta).abs(), s, theta).expect("unbroken by construction")
}

fn max_over<R: Rng>(samples: usize, rng: &mut R, mut f: impl FnMut(&mut R) -> f64) -> f64 {
    (0..samples).map(|_| f(rng)).fold(0.0, f64::max)
}

/// Largest entrywise gap between the closed-form evolved metric and
/// `cos²α · e^{iH†t} e^{−iHt}`, with ω taken from `omega`.
pub fn evolved_metric_defect(samples: usize, seed: u64, omega: impl Fn(&PtParams) -> f64) -> f64 {
    let mut rng = qubit_rng(seed, 7);
    max_over(samples, &mut rng, |rng| {
        let p = params(rng);
        let t = rng.random_range(0.0..4.0);
        let alpha = alpha_of(&p).expect("unbroken");
        let u = p.hamiltonian().scale(Complex::new(0.0, -t)).exp();
        let direct = (u.dagger() * u).scale(Complex::new(alpha.cos().powi(2), 0.0));
        evolved_metric(alpha, omega(&p), t).max_abs_diff(&direct)
    })
}

/// Runs every check with `samples` random draws each.
pub fn run_suite(samples: usize, seed: u64) -> Vec<Check> {
    let rng = |k| qubit_rng(seed, k);
    let mut checks = Vec::new();

    let mut r = rng(0);
    checks.push(Check::identity(
        "herm_inner conjugate symmetry",
        samples,
        max_over(samples, &mut r, |r| {
            let (u, v) = (state(r), state(r));
            herm_inner(u, v).max_abs_diff(&herm_inner(v, u).conj())
        }),
    ));
    checks.push(Check::identity(
        "hermitian projector idempotent",
        samples,
        max_over(samples, &mut r, |r| {
            let p = herm_projector(state(r)).expect("nonzero");
            (p * p).max_abs_diff(&p)
        }),
    ));
    checks.push(Check::identity(
        "mat_apply linear",
        samples,
        max_over(samples, &mut r, |r| {
            let (m, u, v, a, b) = (matrix(r), state(r), state(r), complex(r), complex(r));
            mat_apply(&m, u.scale(a) + v.scale(b))
                .max_abs_diff(&(mat_apply(&m, u).scale(a) + mat_apply(&m, v).scale(b)))
        }),
    ));

    let mut r = rng(1);
    checks.push(Check::identity(
        "[C, H] = 0",
        samples,
        max_over(samples, &mut r, |r| {
            let p = params(r);
            c_operator(&p.metric().expect("unbroken")).commutator(p.hamiltonian()).max_abs()
        }),
    ));
    checks.push(Check::identity(
        "C^2 = I",
        samples,
        max_over(samples, &mut r, |r| {
            let c = c_operator(&p_metric(r));
            (c * c).max_abs_diff(&Mat2::identity())
        }),
    ));

    let mut r = rng(2);
    let a2 = approach2_strategy(FRAC_PI_4, 3.0 * FRAC_PI_4).expect("attack angles").branches()[0].pair;
    let a2_metric = CptMetric::new(FRAC_PI_4).expect("nonsingular");
    let a2_defect = a2_metric.cpt_commutator(a2.p_plus).max_abs().max(a2_metric.cpt_commutator(a2.p_minus).max_abs());
    checks.push(Check::identity(
        "[CPT, P] = 0",
        samples,
        max_over(samples, &mut r, |r| {
            let m = p_metric(r);
            let r1 = r1_gate();
            let shipped = [r1 * Bb84State::Psi01.vector(), r1 * Bb84State::Psi11.vector()];
            let random = state(r);
            shipped
                .into_iter()
                .chain([random])
                .map(|v| {
                    let p = cpt_projector(&m, v).expect("nonzero");
                    // Projectors of nearly null vectors grow like 1/cos²α; compare relative to size.
                    m.cpt_commutator(p).max_abs() / (1.0 + p.max_abs()).powi(2)
                })
                .fold(a2_defect, f64::max)
        }),
    ));
    checks.push(Check::identity(
        "P+ + P- = I, P^2 = P",
        samples,
        max_over(samples, &mut r, |r| {
            let m = p_metric(r);
            let v = state(r);
            let bra = m.cpt(v);
            let w = StateVec::new(-bra.a1, bra.a0);
            let pair = match MeasurementPair::from_states(Metric::Cpt(m), v, w) {
                Ok(p) => p,
                Err(_) => return f64::INFINITY,
            };
            let scale = (1.0 + pair.p_plus.max_abs()).powi(2);
            [pair, a2, Basis::Computational.measurement(), Basis::Diagonal.measurement()]
                .iter()
                .map(|p| {
                    let complete = (p.p_plus + p.p_minus).max_abs_diff(&Mat2::identity());
                    let idem = (p.p_plus * p.p_plus)
                        .max_abs_diff(&p.p_plus)
                        .max((p.p_minus * p.p_minus).max_abs_diff(&p.p_minus));
                    complete.max(idem)
                })
                .fold(0.0, f64::max)
                / scale
        }),
    ));

    let mut r = rng(3);
    checks.push(Check::identity(
        "CPT norm conserved under evolution",
        samples,
        max_over(samples, &mut r, |r| {
            let p = params(r);
            let m = p.metric().expect("unbroken");
            let t = r.random_range(0.0..4.0);
            let v = state(r);
            let u = evolution_operator(&p, t).expect("unbroken");
            let before = cpt_inner(&m, v, v).re;
            (cpt_inner(&m, u * v, u * v).re - before).abs() / (1.0 + before)
        }),
    ));
    let witness = {
        let p = PtParams::from_alpha_omega(0.8, 1.0).expect("unbroken");
        let v = StateVec::real(1.0, 0.0);
        ((evolution_operator(&p, 0.7).expect("unbroken") * v).norm_sqr() - 1.0).abs()
    };
    checks.push(Check::witness(
        "Hermitian norm not conserved",
        1,
        witness,
        1e-3,
        "| |U v|^2 - |v|^2 | at alpha = 0.8, t = 0.7, v = |0>",
    ));
    checks.push(Check::identity(
        "evolved metric = cos^2(a) e^{iH't} e^{-iHt}",
        samples,
        evolved_metric_defect(samples, seed, |p| omega_of(p).expect("unbroken")),
    ));
    checks.push(Check::witness(
        "fault injection: omega = s breaks the metric identity",
        samples,
        evolved_metric_defect(samples, seed, |p| p.s),
        1e-6,
        "the identity must fail when omega = s replaces s cos(alpha)",
    ));

    checks.push(Check::identity(
        "Hadamard converts bases",
        2,
        (0..2u8)
            .map(|b| (Mat2::hadamard() * encode(b, Basis::Computational)).max_abs_diff(&encode(b, Basis::Diagonal)))
            .fold(0.0, f64::max),
    ));

    let mut r = rng(4);
    checks.push(Check::identity(
        "R1 states CPT-orthogonal for all alpha",
        samples,
        max_over(samples, &mut r, |r| {
            let r1 = r1_gate();
            cpt_cosine(&p_metric(r), r1 * Bb84State::Psi01.vector(), r1 * Bb84State::Psi11.vector())
                .map_or(f64::INFINITY, |c| c.norm())
        }),
    ));
    checks.push(Check::identity("approach2 cos(psi00', psi11') = 0", 1, {
        let g = ptqkd_core::eve::approach2_gate(3.0 * FRAC_PI_4);
        cpt_cosine(&a2_metric, g * Bb84State::Psi00.vector(), g * Bb84State::Psi11.vector())
            .map_or(f64::INFINITY, |c| c.norm())
    }));

    let mut r = rng(5);
    checks.push(Check::identity(
        "approach3 evolved states Hermitian-orthogonal",
        samples,
        max_over(samples, &mut r, |r| {
            let alpha = r.random_range(alpha_optimal()..1.5);
            if approach3_time(alpha, FRAC_PI_4, 1.0).is_err() {
                return f64::INFINITY;
            }
            let Ok(s) = approach3_strategy(alpha, FRAC_PI_4) else { return f64::INFINITY };
            let prep = s.branches()[0].prep;
            let (u, v) = (prep * Bb84State::Psi00.vector(), prep * Bb84State::Psi11.vector());
            herm_inner(u, v).norm() / (u.norm_sqr() * v.norm_sqr()).sqrt()
        }),
    ));

    let guard = CptMetric::new(GUARD_PROBE);
    checks.push(Check {
        name: "singular-metric guard at alpha = 1.5707963",
        samples: 1,
        measured: GUARD_PROBE,
        tolerance: 0.0,
        passed: matches!(guard, Err(Error::SingularMetric(_))),
        detail: match guard {
            Err(e) => e.to_string(),
            Ok(_) => "metric accepted".into(),
        },
    });
    checks
}

fn p_metric(r: &mut impl Rng) -> CptMetric {
    CptMetric::new(r.random_range(-1.4..1.4)).expect("inside guard")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        let checks = run_suite(200, 1);
        for c in &checks {
            assert!(c.passed, "{} failed: {:e}", c.name, c.measured);
        }
        assert!(checks.len() >= 15);
    }

    #[test]
    fn wrong_omega_is_caught() {
        assert!(evolved_metric_defect(50, 3, |p| p.s) > 1e-3);
        assert!(evolved_metric_defect(50, 3, |p| omega_of(p).unwrap()) < TOLERANCE);
    }
}
