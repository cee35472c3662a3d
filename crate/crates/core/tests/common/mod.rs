//! Reference implementation of the attacks written directly in terms of
//! Gram matrices, used to cross-check the library's enumeration.
#![allow(dead_code)]

use num_complex::Complex64 as C;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_8};

pub type V = [C; 2];
pub type M = [[C; 2]; 2];

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn r(x: f64) -> C {
    C::new(x, 0.0)
}

pub fn mul(a: M, b: M) -> M {
    let mut out = [[C::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn apply(a: M, v: V) -> V {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

pub fn inv(a: M) -> M {
    let d = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    [[a[1][1] / d, -a[0][1] / d], [-a[1][0] / d, a[0][0] / d]]
}

pub fn ident() -> M {
    [[r(1.0), r(0.0)], [r(0.0), r(1.0)]]
}

/// Taylor series with scaling and squaring.
pub fn expm(a: M) -> M {
    let norm: f64 = a.iter().flatten().map(|z| z.norm()).sum();
    let k = (norm.max(1.0).log2().ceil() as i32 + 4).max(0);
    let scale = 0.5f64.powi(k);
    let x = a.map(|row| row.map(|z| z * scale));
    let (mut sum, mut term) = (ident(), ident());
    for n in 1..40 {
        term = mul(term, x).map(|row| row.map(|z| z / n as f64));
        for i in 0..2 {
            for j in 0..2 {
                sum[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..k {
        sum = mul(sum, sum);
    }
    sum
}

/// Gram matrix `G` with `⟨u|v⟩ = u†·G·v`. Identity for the Hermitian product.
pub fn gram_cpt(alpha: f64) -> M {
    let (s, co) = alpha.sin_cos();
    [[r(1.0 / co), c(0.0, -s / co)], [c(0.0, s / co), r(1.0 / co)]]
}

pub fn inner(g: M, u: V, v: V) -> C {
    let gv = apply(g, v);
    u[0].conj() * gv[0] + u[1].conj() * gv[1]
}

pub fn normalize(v: V) -> V {
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / n, v[1] / n]
}

/// `[ψ00, ψ10, ψ01, ψ11]` with `(bit, basis)` labels.
pub fn bb84() -> [(u8, u8, V); 4] {
    let h = FRAC_1_SQRT_2;
    [(0, 0, [r(1.0), r(0.0)]), (1, 0, [r(0.0), r(1.0)]), (0, 1, [r(h), r(h)]), (1, 1, [r(h), r(-h)])]
}

fn basis_state(bit: u8, basis: u8) -> V {
    bb84().into_iter().find(|&(a, b, _)| a == bit && b == basis).unwrap().2
}

/// One preparation followed by a two-outcome measurement on orthogonal
/// states of the metric `gram`.
#[derive(Clone, Copy)]
pub struct Disc {
    pub prep: M,
    pub gram: M,
    pub plus: V,
    pub minus: V,
    pub bit_plus: u8,
    pub bit_minus: u8,
    pub minus_unambiguous: bool,
}

impl Disc {
    pub fn p_plus(&self, input: V) -> f64 {
        let phi = apply(self.prep, input);
        let g = self.gram;
        let num = inner(g, self.plus, phi).norm_sqr();
        num / (inner(g, self.plus, self.plus).re * inner(g, phi, phi).re)
    }

    fn resend(&self, plus: bool) -> V {
        normalize(apply(inv(self.prep), if plus { self.plus } else { self.minus }))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Figures {
    pub accuracy: f64,
    pub unambiguous: f64,
    pub qber: f64,
}

/// Enumerates inputs, branches and outcomes; Eve resends the preimage of
/// the state she observed.
pub fn figures(branches: &[Disc]) -> Figures {
    let w = 0.25 / branches.len() as f64;
    let (mut accuracy, mut unambiguous, mut qber) = (0.0, 0.0, 0.0);
    for (bit, basis, psi) in bb84() {
        let wrong = basis_state(1 - bit, basis);
        for d in branches {
            let pp = d.p_plus(psi);
            for (plus, p) in [(true, pp), (false, 1.0 - pp)] {
                let guess = if plus { d.bit_plus } else { d.bit_minus };
                if guess == bit {
                    accuracy += w * p;
                }
                if !plus && d.minus_unambiguous {
                    unambiguous += w * p;
                }
                let sent = d.resend(plus);
                let overlap = wrong[0].conj() * sent[0] + wrong[1].conj() * sent[1];
                qber += w * p * overlap.norm_sqr();
            }
        }
    }
    Figures { accuracy, unambiguous, qber }
}

pub fn hermitian() -> Vec<Disc> {
    (0..2)
        .map(|basis| Disc {
            prep: ident(),
            gram: ident(),
            plus: basis_state(0, basis),
            minus: basis_state(1, basis),
            bit_plus: 0,
            bit_minus: 1,
            minus_unambiguous: false,
        })
        .collect()
}

fn r1() -> M {
    [[r(1.0), r(0.0)], [r(0.0), c(0.0, 1.0)]]
}

pub fn approach1(epsilon: f64) -> Vec<Disc> {
    let prep = r1();
    vec![Disc {
        prep,
        gram: gram_cpt(FRAC_PI_2 - epsilon),
        plus: apply(prep, basis_state(0, 1)),
        minus: apply(prep, basis_state(1, 1)),
        bit_plus: 0,
        bit_minus: 1,
        minus_unambiguous: true,
    }]
}

pub fn approach2(alpha: f64, rho: f64) -> Vec<Disc> {
    let h = FRAC_1_SQRT_2;
    let had = [[r(h), r(h)], [r(h), r(-h)]];
    let (s, co) = (rho / 2.0).sin_cos();
    let r2 = [[r(co), c(0.0, s)], [c(0.0, s), r(co)]];
    let prep = mul(r2, mul(r1(), had));
    vec![Disc {
        prep,
        gram: gram_cpt(alpha),
        plus: apply(prep, basis_state(0, 0)),
        minus: apply(prep, basis_state(1, 1)),
        bit_plus: 0,
        bit_minus: 1,
        minus_unambiguous: false,
    }]
}

/// Evolution `exp(−iHt)` for `H = [[i s sin α, s], [s, −i s sin α]]`, `s = ω / cos α`.
pub fn evolution(alpha: f64, omega: f64, t: f64) -> M {
    let s = omega / alpha.cos();
    let rr = s * alpha.sin();
    let h = [[c(0.0, rr), r(s)], [r(s), c(0.0, -rr)]];
    expm(h.map(|row| row.map(|z| z * c(0.0, -t))))
}

pub fn g3() -> M {
    let (s, co) = FRAC_PI_8.sin_cos();
    [[r(co), r(s)], [c(0.0, -s), c(0.0, co)]]
}

/// Smallest `t ∈ (0, π/2ω]` making the evolved images of ψ00 and ψ11
/// Hermitian-orthogonal, found by bisection on their real overlap.
pub fn orthogonalizing_time(alpha: f64, omega: f64) -> Option<f64> {
    let overlap = |t: f64| {
        let prep = mul(evolution(alpha, omega, t), g3());
        let (u, v) = (apply(prep, basis_state(0, 0)), apply(prep, basis_state(1, 1)));
        inner(ident(), u, v).re
    };
    let (mut lo, mut hi) = (0.0, FRAC_PI_2 / omega);
    if overlap(hi) > 1e-9 {
        return None;
    }
    if overlap(hi) > -1e-12 {
        return Some(hi);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if overlap(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

pub fn approach3(alpha: f64, omega: f64) -> Option<Vec<Disc>> {
    let t = orthogonalizing_time(alpha, omega)?;
    let prep = mul(evolution(alpha, omega, t), g3());
    Some(vec![Disc {
        prep,
        gram: ident(),
        plus: apply(prep, basis_state(0, 0)),
        minus: apply(prep, basis_state(1, 1)),
        bit_plus: 0,
        bit_minus: 1,
        minus_unambiguous: false,
    }])
}
