//! Eavesdropping strategies.
//!
//! Every strategy here is an intercept-resend attack that measures each qubit
//! once. A strategy is a uniform mixture of *branches*; each branch applies a
//! preparation gate, performs one binary measurement (Hermitian or CPT) and
//! maps the outcome to a bit guess. The Hermitian baseline has two branches
//! (Eve's basis guess); the PT-symmetric approaches have one.
//!
//! A finite discriminator efficiency η is layered on top by
//! [`apply_efficiency`]: with probability `1 − η` the measurement returns a
//! null result.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bb84::{encode, Basis, Bb84State};
use crate::error::{Error, Result};
use crate::ptcore::{
    alpha_optimal, approach3_time, evolution_operator, CptMetric, MeasurementPair, Metric, Outcome, PtParams,
};
use crate::qmath::{herm_inner, re, Complex, Mat2, StateVec, I, ONE};

/// Largest tolerated overlap between the two reference states of a
/// discriminating measurement.
pub const ORTHOGONALITY_TOL: f64 = 1e-9;

/// Default distance of the Approach-1 metric from the breaking point.
pub const DEFAULT_EPSILON: f64 = 1e-3;

/// How much Eve learned from one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tag {
    Conclusive,
    Unambiguous,
    InconclusiveNull,
}

/// Result of intercepting one qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EveOutcome {
    /// `None` means undecided.
    pub inferred_bit: Option<u8>,
    pub tag: Tag,
    /// State forwarded to Bob; `None` when the qubit is dropped.
    pub resend: Option<StateVec>,
    /// Number of measurements performed on the intercepted qubit.
    pub measurements: u32,
}

/// What Eve forwards after a conclusive measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResendPolicy {
    /// Collapsed state pulled back through the inverse preparation gate.
    #[default]
    Invert,
    /// Fresh encoding of the inferred bit in a random basis.
    Reencode,
}

/// Handling of null discriminator results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NullPolicy {
    /// Bit scored as wrong; a uniformly random BB84 state is forwarded.
    #[default]
    Wrong,
    /// Qubit is dropped and looks like channel loss to Bob.
    Loss,
}

/// What Eve writes down after a null result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FallbackPolicy {
    #[default]
    None,
    /// Fair coin, scored like any other guess.
    Coin,
}

macro_rules! policy_from_str {
    ($ty:ty, $($name:literal => $variant:expr),+) => {
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok($variant),)+
                    other => Err(Error::Domain(format!("unknown {} `{other}`", stringify!($ty)))),
                }
            }
        }
    };
}

policy_from_str!(ResendPolicy, "invert" => ResendPolicy::Invert, "reencode" => ResendPolicy::Reencode);
policy_from_str!(NullPolicy, "wrong" => NullPolicy::Wrong, "loss" => NullPolicy::Loss);
policy_from_str!(FallbackPolicy, "none" => FallbackPolicy::None, "coin" => FallbackPolicy::Coin);

/// Discriminator efficiency and null handling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyModel {
    pub eta: f64,
    pub null_policy: NullPolicy,
    pub fallback_policy: FallbackPolicy,
}

impl EfficiencyModel {
    pub fn new(eta: f64, null_policy: NullPolicy, fallback_policy: FallbackPolicy) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::Domain(format!("efficiency η must lie in [0, 1], got {eta}")));
        }
        Ok(Self { eta, null_policy, fallback_policy })
    }

    pub fn ideal() -> Self {
        Self { eta: 1.0, null_policy: NullPolicy::Wrong, fallback_policy: FallbackPolicy::None }
    }
}

impl Default for EfficiencyModel {
    fn default() -> Self {
        Self::ideal()
    }
}

/// Bit guess attached to a measurement outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Verdict {
    pub bit: u8,
    pub tag: Tag,
}

/// One preparation + measurement + decoding path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    pub prep: Mat2,
    pub prep_inv: Mat2,
    pub pair: MeasurementPair,
    pub on_plus: Verdict,
    pub on_minus: Verdict,
}

impl Branch {
    fn new(prep: Mat2, pair: MeasurementPair, on_plus: Verdict, on_minus: Verdict) -> Result<Self> {
        Ok(Self { prep, prep_inv: prep.inverse()?, pair, on_plus, on_minus })
    }

    pub fn verdict(&self, o: Outcome) -> Verdict {
        match o {
            Outcome::Plus => self.on_plus,
            Outcome::Minus => self.on_minus,
        }
    }

    /// `P(+1)` for an intercepted state.
    pub fn prob_plus(&self, input: StateVec) -> Result<f64> {
        self.pair.prob_plus(self.prep * input)
    }

    /// Forwarded state for a given outcome under the invert policy.
    pub fn inverted_resend(&self, input: StateVec, o: Outcome) -> Result<StateVec> {
        let collapsed = self.pair.collapse(self.prep * input, o)?;
        (self.prep_inv * collapsed).normalized()
    }
}

/// Strategy label plus the parameters it was built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum StrategySpec {
    Hermitian,
    Approach1 { epsilon: f64 },
    Approach2 { alpha: f64, rho: f64 },
    Approach3 { alpha: f64, sigma: f64, omega: f64 },
}

impl StrategySpec {
    /// Names accepted on the command line, besides `none`.
    pub const NAMES: [&'static str; 4] = ["hermitian", "approach1", "approach2", "approach3"];

    /// Default parameters for a command-line strategy name; `none` maps to `Ok(None)`.
    pub fn from_name(name: &str) -> Result<Option<Self>> {
        Ok(Some(match name {
            "none" => return Ok(None),
            "hermitian" => StrategySpec::Hermitian,
            "approach1" => StrategySpec::Approach1 { epsilon: DEFAULT_EPSILON },
            "approach2" => StrategySpec::Approach2 { alpha: FRAC_PI_4, rho: 3.0 * FRAC_PI_4 },
            "approach3" => StrategySpec::Approach3 { alpha: alpha_optimal(), sigma: FRAC_PI_4, omega: 1.0 },
            other => return Err(Error::Domain(format!("unknown strategy `{other}`"))),
        }))
    }

    pub fn name(&self) -> &'static str {
        match self {
            StrategySpec::Hermitian => "hermitian",
            StrategySpec::Approach1 { .. } => "approach1",
            StrategySpec::Approach2 { .. } => "approach2",
            StrategySpec::Approach3 { .. } => "approach3",
        }
    }

    pub fn build(&self) -> Result<Strategy> {
        match *self {
            StrategySpec::Hermitian => hermitian_strategy(),
            StrategySpec::Approach1 { epsilon } => approach1_strategy(epsilon),
            StrategySpec::Approach2 { alpha, rho } => approach2_strategy(alpha, rho),
            StrategySpec::Approach3 { alpha, sigma, omega } => approach3_strategy_with_omega(alpha, sigma, omega),
        }
    }
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Exact per-qubit figures for a strategy, from enumerating Born probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactFigures {
    /// Eve's accuracy on sifted positions.
    pub accuracy: f64,
    /// Fraction of all qubits tagged unambiguous.
    pub unambiguous_rate: f64,
    /// QBER Bob sees on the sifted key.
    pub qber: f64,
    /// Fraction of qubits dropped by Eve.
    pub lost_fraction: f64,
}

/// An intercept-resend eavesdropper.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy {
    spec: StrategySpec,
    branches: Vec<Branch>,
    efficiency: EfficiencyModel,
    resend: ResendPolicy,
    /// Evolution time for Approach 3.
    tau: Option<f64>,
}

impl Strategy {
    fn new(spec: StrategySpec, branches: Vec<Branch>) -> Self {
        Self { spec, branches, efficiency: EfficiencyModel::ideal(), resend: ResendPolicy::Invert, tau: None }
    }

    pub fn name(&self) -> &'static str {
        self.spec.name()
    }

    pub fn spec(&self) -> StrategySpec {
        self.spec
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn efficiency(&self) -> EfficiencyModel {
        self.efficiency
    }

    pub fn resend_policy(&self) -> ResendPolicy {
        self.resend
    }

    pub fn tau(&self) -> Option<f64> {
        self.tau
    }

    pub fn with_resend(mut self, resend: ResendPolicy) -> Self {
        self.resend = resend;
        self
    }

    /// Measures one in-flight qubit and decides what to forward.
    pub fn intercept<R: Rng + ?Sized>(&self, state: StateVec, rng: &mut R) -> Result<EveOutcome> {
        let eff = self.efficiency;
        if eff.eta < 1.0 && rng.random::<f64>() >= eff.eta {
            let inferred_bit = match eff.fallback_policy {
                FallbackPolicy::None => None,
                FallbackPolicy::Coin => Some(rng.random_range(0..2u8)),
            };
            let resend = match eff.null_policy {
                NullPolicy::Wrong => Some(encode(rng.random_range(0..2u8), Basis::random(rng))),
                NullPolicy::Loss => None,
            };
            return Ok(EveOutcome { inferred_bit, tag: Tag::InconclusiveNull, resend, measurements: 1 });
        }

        let branch = match self.branches.len() {
            1 => &self.branches[0],
            n => &self.branches[rng.random_range(0..n)],
        };
        let (outcome, collapsed) = branch.pair.measure(branch.prep * state, rng)?;
        let verdict = branch.verdict(outcome);
        let resend = match self.resend {
            ResendPolicy::Invert => (branch.prep_inv * collapsed).normalized()?,
            ResendPolicy::Reencode => encode(verdict.bit, Basis::random(rng)),
        };
        Ok(EveOutcome { inferred_bit: Some(verdict.bit), tag: verdict.tag, resend: Some(resend), measurements: 1 })
    }

    /// Exact figures for the ideal (η = 1) discriminator.
    fn base_figures(&self) -> Result<ExactFigures> {
        let weight = 1.0 / (4.0 * self.branches.len() as f64);
        let (mut accuracy, mut unambiguous, mut qber) = (0.0, 0.0, 0.0);
        for input in Bb84State::ALL {
            let psi = input.vector();
            let bob = input.basis().measurement();
            for branch in &self.branches {
                let p_plus = branch.prob_plus(psi)?;
                for (o, p) in [(Outcome::Plus, p_plus), (Outcome::Minus, 1.0 - p_plus)] {
                    if p == 0.0 {
                        continue;
                    }
                    let v = branch.verdict(o);
                    if v.bit == input.bit() {
                        accuracy += weight * p;
                    }
                    if v.tag == Tag::Unambiguous {
                        unambiguous += weight * p;
                    }
                    // Bob reads bit 0 on +1; sifted means he used Alice's basis.
                    let bob_error = |sent: StateVec| -> Result<f64> {
                        let p0 = bob.prob_plus(sent)?;
                        Ok(if input.bit() == 0 { 1.0 - p0 } else { p0 })
                    };
                    let err = match self.resend {
                        ResendPolicy::Invert => bob_error(branch.inverted_resend(psi, o)?)?,
                        ResendPolicy::Reencode => {
                            0.5 * (bob_error(encode(v.bit, Basis::Computational))?
                                + bob_error(encode(v.bit, Basis::Diagonal))?)
                        }
                    };
                    qber += weight * p * err;
                }
            }
        }
        Ok(ExactFigures { accuracy, unambiguous_rate: unambiguous, qber, lost_fraction: 0.0 })
    }

    /// Exact figures including the efficiency model.
    pub fn exact_figures(&self) -> Result<ExactFigures> {
        let base = self.base_figures()?;
        let EfficiencyModel { eta, null_policy, fallback_policy } = self.efficiency;
        let null_accuracy = match fallback_policy {
            FallbackPolicy::None => 0.0,
            FallbackPolicy::Coin => 0.5,
        };
        Ok(match null_policy {
            // A random BB84 state disagrees with Alice's bit half the time in her basis.
            NullPolicy::Wrong => ExactFigures {
                accuracy: eta * base.accuracy + (1.0 - eta) * null_accuracy,
                unambiguous_rate: eta * base.unambiguous_rate,
                qber: eta * base.qber + (1.0 - eta) * 0.5,
                lost_fraction: 0.0,
            },
            // Dropped qubits never reach the sifted key.
            NullPolicy::Loss => ExactFigures {
                accuracy: base.accuracy,
                unambiguous_rate: eta * base.unambiguous_rate,
                qber: base.qber,
                lost_fraction: 1.0 - eta,
            },
        })
    }
}

/// Exact accuracy on sifted positions, `¼ Σ_states P(correct bit)`.
pub fn exact_accuracy(s: &Strategy) -> Result<f64> {
    Ok(s.exact_figures()?.accuracy)
}

/// Wraps `base` with a finite-efficiency discriminator. Replaces any model
/// already attached.
pub fn apply_efficiency(mut base: Strategy, model: EfficiencyModel) -> Strategy {
    base.efficiency = model;
    base
}

fn conclusive(bit: u8) -> Verdict {
    Verdict { bit, tag: Tag::Conclusive }
}

/// Eve guesses a basis, measures in it and resends what she saw.
pub fn hermitian_strategy() -> Result<Strategy> {
    let branches = [Basis::Computational, Basis::Diagonal]
        .into_iter()
        .map(|basis| Branch::new(Mat2::identity(), basis.measurement(), conclusive(0), conclusive(1)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Strategy::new(StrategySpec::Hermitian, branches))
}

/// Phase gate `R1 = diag(1, i)`.
pub fn r1_gate() -> Mat2 {
    Mat2::diag(ONE, I)
}

/// `R2(ρ) = [[cos ρ/2, i sin ρ/2], [i sin ρ/2, cos ρ/2]]`.
pub fn r2_gate(rho: f64) -> Mat2 {
    let (s, c) = (rho / 2.0).sin_cos();
    let is = Complex::new(0.0, s);
    Mat2::new(re(c), is, is, re(c))
}

/// Approach-2 preparation `R2(ρ) · R1 · H`.
pub fn approach2_gate(rho: f64) -> Mat2 {
    r2_gate(rho) * r1_gate() * Mat2::hadamard()
}

/// The linear map taking `|ψ00⟩` to
/// `(cos((π−2σ)/4), −i sin((π−2σ)/4))` and `|ψ11⟩` to
/// `(cos((π+2σ)/4), −i sin((π+2σ)/4))`. The two images pin it down
/// completely; it is unitary only for σ = π/4.
pub fn approach3_gate(sigma: f64) -> Result<Mat2> {
    let target = |angle: f64| StateVec::new(re(angle.cos()), Complex::new(0.0, -angle.sin()));
    let t00 = target((std::f64::consts::PI - 2.0 * sigma) / 4.0);
    let t11 = target((std::f64::consts::PI + 2.0 * sigma) / 4.0);
    let (s00, s11) = (Bb84State::Psi00.vector(), Bb84State::Psi11.vector());
    let source = Mat2::new(s00.a0, s11.a0, s00.a1, s11.a1);
    let image = Mat2::new(t00.a0, t11.a0, t00.a1, t11.a1);
    let gate = image * source.inverse()?;
    let defect = (gate.dagger() * gate - Mat2::identity()).max_abs();
    if defect > ORTHOGONALITY_TOL {
        return Err(Error::Precondition(format!(
            "σ = {sigma} does not admit a unitary preparation (|G†G − I| = {defect:.3e}); only σ = π/4 does"
        )));
    }
    Ok(gate)
}

/// Unambiguous exclusion of `|ψ11⟩` near the PT breaking point, α = π/2 − ε.
pub fn approach1_strategy(epsilon: f64) -> Result<Strategy> {
    if epsilon > 0.1 || epsilon.is_nan() {
        return Err(Error::Precondition(format!("approach1 needs 0 < ε ≤ 0.1, got {epsilon}")));
    }
    let metric = CptMetric::new(FRAC_PI_2 - epsilon)?;
    let r1 = r1_gate();
    let pair = MeasurementPair::from_states(
        Metric::Cpt(metric),
        r1 * Bb84State::Psi01.vector(),
        r1 * Bb84State::Psi11.vector(),
    )?;
    // +1 leaves {ψ00, ψ10, ψ01}; two of the three carry bit 0.
    let branch = Branch::new(r1, pair, conclusive(0), Verdict { bit: 1, tag: Tag::Unambiguous })?;
    Ok(Strategy::new(StrategySpec::Approach1 { epsilon }, vec![branch]))
}

/// CPT measurement with the transformed `|ψ00⟩`, `|ψ11⟩` made CPT-orthogonal.
pub fn approach2_strategy(alpha: f64, rho: f64) -> Result<Strategy> {
    let metric = Metric::Cpt(CptMetric::new(alpha)?);
    let gate = approach2_gate(rho);
    let (u, v) = (gate * Bb84State::Psi00.vector(), gate * Bb84State::Psi11.vector());
    let overlap = metric.cosine(u, v)?.norm();
    if overlap > ORTHOGONALITY_TOL {
        return Err(Error::Precondition(format!(
            "approach2 needs CPT-orthogonal ψ00, ψ11 at (α, ρ) = ({alpha}, {rho}); |cos| = {overlap:.3e}"
        )));
    }
    let pair = MeasurementPair::from_states(metric, u, v)?;
    let branch = Branch::new(gate, pair, conclusive(0), conclusive(1))?;
    Ok(Strategy::new(StrategySpec::Approach2 { alpha, rho }, vec![branch]))
}

/// Non-Hermitian evolution followed by a Hermitian measurement, ω = 1.
pub fn approach3_strategy(alpha: f64, sigma: f64) -> Result<Strategy> {
    approach3_strategy_with_omega(alpha, sigma, 1.0)
}

pub fn approach3_strategy_with_omega(alpha: f64, sigma: f64, omega: f64) -> Result<Strategy> {
    let gate = approach3_gate(sigma)?;
    let tau = approach3_time(alpha, sigma, omega)?;
    let params = PtParams::from_alpha_omega(alpha, omega)?;
    let prep = evolution_operator(&params, tau)? * gate;
    let (u, v) = (prep * Bb84State::Psi00.vector(), prep * Bb84State::Psi11.vector());
    let overlap = herm_inner(u, v).norm() / (u.norm_sqr() * v.norm_sqr()).sqrt();
    if overlap > ORTHOGONALITY_TOL {
        return Err(Error::Precondition(format!(
            "evolved ψ00, ψ11 are not Hermitian-orthogonal at α = {alpha}: |cos| = {overlap:.3e}"
        )));
    }
    let pair = MeasurementPair::from_states(Metric::Hermitian, u, v)?;
    let branch = Branch::new(prep, pair, conclusive(0), conclusive(1))?;
    let mut s = Strategy::new(StrategySpec::Approach3 { alpha, sigma, omega }, vec![branch]);
    s.tau = Some(tau);
    Ok(s)
}

/// Closed form of the σ = π/4 preparation gate,
/// `[[cos π/8, sin π/8], [−i sin π/8, i cos π/8]]`.
pub fn approach3_gate_closed_form() -> Mat2 {
    let (s, c) = FRAC_PI_8.sin_cos();
    Mat2::new(re(c), re(s), Complex::new(0.0, -s), Complex::new(0.0, c))
}
