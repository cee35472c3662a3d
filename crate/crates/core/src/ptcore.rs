//! PT-symmetric two-level machinery.
//!
//! The Hamiltonian `H = [[r e^{iθ}, s], [s, r e^{-iθ}]]` has a real spectrum
//! while `|(r/s) sin θ| < 1`. In that unbroken phase the angle
//! `α = arcsin((r/s) sin θ)` fixes the `C` operator, and `C`, parity and
//! complex conjugation together define a positive-definite inner product
//! `⟨λ|μ⟩ = (CPT λ)ᵀ · μ`. The evolution `e^{-iHt}` is not unitary in the
//! Hermitian sense, but it preserves that CPT norm.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{re, Complex, Mat2, StateVec};

/// Distance from `±π/2` below which the CPT metric is treated as singular.
pub const SINGULAR_GUARD: f64 = 1e-7;

/// Slack allowed when `sin²(ωτ)` lands a rounding error above one.
const TIME_RHS_SLACK: f64 = 1e-12;

/// Smallest α for which the σ = π/4 evolution time exists,
/// `tan⁻¹(√((√2 − 1)/2)) ≈ 0.427079`.
pub fn alpha_optimal() -> f64 {
    ((std::f64::consts::SQRT_2 - 1.0) / 2.0).sqrt().atan()
}

/// Parameters `(r, s, θ)` of the PT-symmetric Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PtParams {
    pub r: f64,
    pub s: f64,
    pub theta: f64,
}

impl PtParams {
    /// Validates the unbroken-phase condition. `s` must be positive so that
    /// `ω = s cos α` is the positive root used by the evolution operator.
    pub fn new(r: f64, s: f64, theta: f64) -> Result<Self> {
        if !(r.is_finite() && s.is_finite() && theta.is_finite()) {
            return Err(Error::Domain("PT parameters must be finite".into()));
        }
        if s <= 0.0 {
            return Err(Error::Domain(format!("coupling s must be positive, got {s}")));
        }
        let p = Self { r, s, theta };
        let arg = p.sin_alpha();
        if arg.abs() >= 1.0 {
            return Err(Error::BrokenPhase(arg.abs()));
        }
        Ok(p)
    }

    /// Parameters realizing a given `(α, ω)` with `r cos θ = 0`: `θ = π/2`,
    /// `s = ω / cos α`, `r = s sin α`.
    pub fn from_alpha_omega(alpha: f64, omega: f64) -> Result<Self> {
        CptMetric::new(alpha)?;
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::Domain(format!("ω must be positive, got {omega}")));
        }
        let s = omega / alpha.cos();
        Self::new(s * alpha.sin(), s, FRAC_PI_2)
    }

    fn sin_alpha(&self) -> f64 {
        self.r / self.s * self.theta.sin()
    }

    pub fn hamiltonian(&self) -> Mat2 {
        let d = Complex::from_polar(self.r, self.theta);
        Mat2::new(d, re(self.s), re(self.s), d.conj())
    }

    pub fn metric(&self) -> Result<CptMetric> {
        CptMetric::new(alpha_of(self)?)
    }
}

/// `α = arcsin((r/s) sin θ)`.
pub fn alpha_of(p: &PtParams) -> Result<f64> {
    let arg = p.sin_alpha();
    if arg.abs() >= 1.0 {
        return Err(Error::BrokenPhase(arg.abs()));
    }
    Ok(arg.asin())
}

/// `ω = √(s² − r² sin² θ)`, half the level splitting.
pub fn omega_of(p: &PtParams) -> Result<f64> {
    let rs = p.r * p.theta.sin();
    let w2 = p.s * p.s - rs * rs;
    if w2 <= 0.0 {
        return Err(Error::BrokenPhase((rs / p.s).abs()));
    }
    Ok(w2.sqrt())
}

/// The α-dependent CPT metric. Construction rejects `|α| ≥ π/2 − 1e-9`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CptMetric {
    alpha: f64,
}

impl CptMetric {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha.abs() >= FRAC_PI_2 - SINGULAR_GUARD {
            return Err(Error::SingularMetric(alpha));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `C = (1/cos α) [[i sin α, 1], [1, −i sin α]]`.
    pub fn c_operator(&self) -> Mat2 {
        let (s, c) = self.alpha.sin_cos();
        Mat2::new(Complex::new(0.0, s), re(1.0), re(1.0), Complex::new(0.0, -s)).scale(re(1.0 / c))
    }

    /// The anti-linear map `x ↦ C·P·x̄`.
    pub fn cpt(&self, v: StateVec) -> StateVec {
        self.c_operator() * (Mat2::parity() * v.conj())
    }

    /// `(CPT u)ᵀ · v`.
    pub fn inner(&self, u: StateVec, v: StateVec) -> Complex {
        self.cpt(u).dot(v)
    }

    /// Matrix form of `[CPT, M]` with `M` acting on bras from the right:
    /// zero iff `CPT(Mx) = (CPT x)ᵀ·M` for all `x`, which is the same as
    /// `M` being self-adjoint under this inner product.
    pub fn cpt_commutator(&self, m: Mat2) -> Mat2 {
        let cp = self.c_operator() * Mat2::parity();
        cp * m.conj() - m.transpose() * cp
    }
}

/// Free-function form of [`CptMetric::c_operator`].
pub fn c_operator(m: &CptMetric) -> Mat2 {
    m.c_operator()
}

/// CPT inner product `⟨u|v⟩ = (CPT u)ᵀ · v`.
pub fn cpt_inner(m: &CptMetric, u: StateVec, v: StateVec) -> Complex {
    m.inner(u, v)
}

/// Which inner product a measurement is orthogonal under.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Hermitian,
    Cpt(CptMetric),
}

impl Metric {
    /// Row vector `⟨v|` under this metric.
    pub fn bra(&self, v: StateVec) -> StateVec {
        match self {
            Metric::Hermitian => v.conj(),
            Metric::Cpt(m) => m.cpt(v),
        }
    }

    pub fn inner(&self, u: StateVec, v: StateVec) -> Complex {
        self.bra(u).dot(v)
    }

    /// Squared norm; must be positive for nonzero vectors.
    pub fn norm_sqr(&self, v: StateVec) -> f64 {
        self.inner(v, v).re
    }

    /// Rank-one projector `|v⟩⟨v| / ⟨v|v⟩`.
    pub fn projector(&self, v: StateVec) -> Result<Mat2> {
        let n = self.norm_sqr(v);
        if !n.is_finite() || n <= 0.0 {
            return match self {
                Metric::Hermitian => Err(Error::ZeroVector),
                Metric::Cpt(_) => Err(Error::CptNull(n)),
            };
        }
        Ok(v.outer(self.bra(v)).scale(re(1.0 / n)))
    }

    /// Normalized overlap `⟨u|v⟩ / √(⟨u|u⟩⟨v|v⟩)`.
    pub fn cosine(&self, u: StateVec, v: StateVec) -> Result<Complex> {
        let (nu, nv) = (self.norm_sqr(u), self.norm_sqr(v));
        if !(nu > 0.0 && nv > 0.0) {
            return Err(Error::CptNull(nu.min(nv)));
        }
        Ok(self.inner(u, v) / (nu * nv).sqrt())
    }

    fn normalize(&self, v: StateVec) -> Result<StateVec> {
        let n = self.norm_sqr(v);
        if !n.is_finite() || n <= 0.0 {
            return Err(Error::DegeneratePostState);
        }
        Ok(v.scale(re(1.0 / n.sqrt())))
    }
}

/// CPT projector onto the ray of `v`.
pub fn cpt_projector(m: &CptMetric, v: StateVec) -> Result<Mat2> {
    Metric::Cpt(*m).projector(v)
}

/// CPT cosine between `u` and `v`; callers usually want `|·|²`.
pub fn cpt_cosine(m: &CptMetric, u: StateVec, v: StateVec) -> Result<Complex> {
    Metric::Cpt(*m).cosine(u, v)
}

/// Binary measurement outcome `±1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub fn value(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }
}

/// Two complementary projectors `P₊`, `P₋` that are orthogonal under
/// `metric`; the observable is `P₊ − P₋`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementPair {
    pub p_plus: Mat2,
    pub p_minus: Mat2,
    pub metric: Metric,
}

impl MeasurementPair {
    /// Completeness and idempotency are checked to this tolerance.
    pub const TOL: f64 = 1e-9;
    /// Probabilities this close to 0 or 1 are reported as exactly 0 or 1.
    pub const CERTAINTY_TOL: f64 = 1e-12;

    /// Builds the pair from the two reference states, which must be
    /// orthogonal under `metric`.
    pub fn from_states(metric: Metric, plus: StateVec, minus: StateVec) -> Result<Self> {
        let pair = Self { p_plus: metric.projector(plus)?, p_minus: metric.projector(minus)?, metric };
        let completeness = (pair.p_plus + pair.p_minus - Mat2::identity()).max_abs();
        if completeness > Self::TOL {
            return Err(Error::Precondition(format!(
                "reference states are not orthogonal: |P+ + P- - I| = {completeness:.3e}"
            )));
        }
        Ok(pair)
    }

    /// Born probability of `+1`, `⟨φ|P₊φ⟩ / ⟨φ|φ⟩` under the pair's metric.
    /// Rounding within [`Self::CERTAINTY_TOL`] of a certain outcome is removed.
    pub fn prob_plus(&self, state: StateVec) -> Result<f64> {
        let n = self.metric.norm_sqr(state);
        if !n.is_finite() || n <= 0.0 {
            return Err(Error::CptNull(n));
        }
        let p = self.metric.inner(state, self.p_plus * state).re / n;
        Ok(if p < Self::CERTAINTY_TOL {
            0.0
        } else if p > 1.0 - Self::CERTAINTY_TOL {
            1.0
        } else {
            p
        })
    }

    pub fn projector(&self, o: Outcome) -> Mat2 {
        match o {
            Outcome::Plus => self.p_plus,
            Outcome::Minus => self.p_minus,
        }
    }

    /// Post-measurement state `P·φ` renormalized under the pair's metric.
    pub fn collapse(&self, state: StateVec, o: Outcome) -> Result<StateVec> {
        self.metric.normalize(self.projector(o) * state)
    }

    /// Samples one outcome and the collapsed state.
    pub fn measure<R: Rng + ?Sized>(&self, state: StateVec, rng: &mut R) -> Result<(Outcome, StateVec)> {
        let p = self.prob_plus(state)?;
        let outcome = if p >= 1.0 {
            Outcome::Plus
        } else if p <= 0.0 {
            Outcome::Minus
        } else if rng.random::<f64>() < p {
            Outcome::Plus
        } else {
            Outcome::Minus
        };
        Ok((outcome, self.collapse(state, outcome)?))
    }
}

/// Free-function form of [`MeasurementPair::measure`].
pub fn cpt_measure<R: Rng + ?Sized>(
    pair: &MeasurementPair,
    state: StateVec,
    rng: &mut R,
) -> Result<(Outcome, StateVec)> {
    pair.measure(state, rng)
}

/// Closed-form `e^{-iHt}` for given `(α, ω)` and energy shift `r cos θ`.
pub fn evolution_operator_from(alpha: f64, omega: f64, shift: f64, t: f64) -> Mat2 {
    let wt = omega * t;
    let phase = Complex::from_polar(1.0 / alpha.cos(), -shift * t);
    let off = Complex::new(0.0, -wt.sin());
    Mat2::new(re((wt - alpha).cos()), off, off, re((wt + alpha).cos())).scale(phase)
}

/// `e^{-iHt} = (e^{-i r cos θ t} / cos α) [[cos(ωt−α), −i sin ωt], [−i sin ωt, cos(ωt+α)]]`.
pub fn evolution_operator(p: &PtParams, t: f64) -> Result<Mat2> {
    let alpha = alpha_of(p)?;
    let omega = omega_of(p)?;
    Ok(evolution_operator_from(alpha, omega, p.r * p.theta.cos(), t))
}

/// `cos²α · e^{iH†t} e^{-iHt}`, the Hermitian metric seen by evolved states.
pub fn evolved_metric(alpha: f64, omega: f64, t: f64) -> Mat2 {
    let wt = omega * t;
    let s2 = wt.sin().powi(2);
    let off = 2.0 * s2 * alpha.sin();
    Mat2::new(
        re((wt - alpha).cos().powi(2) + s2),
        Complex::new(0.0, -off),
        Complex::new(0.0, off),
        re((wt + alpha).cos().powi(2) + s2),
    )
}

/// Smallest positive τ with
/// `sin²(ωτ) = cos²α cos σ / (2 sin α − 2 sin²α cos σ)`.
pub fn approach3_time(alpha: f64, sigma: f64, omega: f64) -> Result<f64> {
    CptMetric::new(alpha)?;
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::Domain(format!("ω must be positive, got {omega}")));
    }
    let rhs = approach3_rhs(alpha, sigma)?;
    if rhs > 1.0 + TIME_RHS_SLACK {
        return Err(Error::NoSolution(rhs));
    }
    Ok(rhs.min(1.0).sqrt().asin() / omega)
}

/// Right-hand side of the evolution-time equation.
pub fn approach3_rhs(alpha: f64, sigma: f64) -> Result<f64> {
    let (sa, ca) = alpha.sin_cos();
    let cs = sigma.cos();
    let denom = 2.0 * sa - 2.0 * sa * sa * cs;
    if denom.is_nan() || denom <= 0.0 {
        return Err(Error::Domain(format!("evolution-time denominator {denom:.3e} is not positive")));
    }
    let rhs = ca * ca * cs / denom;
    if rhs < 0.0 {
        return Err(Error::Domain(format!("sin²(ωτ) would be negative ({rhs:.3e})")));
    }
    Ok(rhs)
}
