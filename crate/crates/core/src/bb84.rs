//! BB84 prepare-and-measure protocol: encoding, interception, Bob's
//! measurement and sifting.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::eve::{Strategy, Tag};
use crate::ptcore::{MeasurementPair, Metric, Outcome};
use crate::qmath::StateVec;
use crate::stream::qubit_rng;

/// Measurement basis. On the wire a basis is a bit: 0 computational, 1 diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    Computational,
    Diagonal,
}

impl Basis {
    pub fn from_bit(b: u8) -> Self {
        if b == 0 {
            Basis::Computational
        } else {
            Basis::Diagonal
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Basis::Computational => 0,
            Basis::Diagonal => 1,
        }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::from_bit(rng.random_range(0..2u8))
    }

    /// Hermitian measurement whose `+1` outcome reads bit 0.
    pub fn measurement(self) -> MeasurementPair {
        MeasurementPair::from_states(Metric::Hermitian, encode(0, self), encode(1, self))
            .expect("basis states are orthonormal")
    }
}

/// The four BB84 states `|ψ_ab⟩`, bit `a` encoded in basis `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Bb84State {
    Psi00,
    Psi10,
    Psi01,
    Psi11,
}

impl Bb84State {
    pub const ALL: [Bb84State; 4] = [Bb84State::Psi00, Bb84State::Psi10, Bb84State::Psi01, Bb84State::Psi11];

    pub fn new(bit: u8, basis: Basis) -> Self {
        match (bit, basis) {
            (0, Basis::Computational) => Bb84State::Psi00,
            (_, Basis::Computational) => Bb84State::Psi10,
            (0, Basis::Diagonal) => Bb84State::Psi01,
            (_, Basis::Diagonal) => Bb84State::Psi11,
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Bb84State::Psi00 | Bb84State::Psi01 => 0,
            Bb84State::Psi10 | Bb84State::Psi11 => 1,
        }
    }

    pub fn basis(self) -> Basis {
        match self {
            Bb84State::Psi00 | Bb84State::Psi10 => Basis::Computational,
            Bb84State::Psi01 | Bb84State::Psi11 => Basis::Diagonal,
        }
    }

    pub fn vector(self) -> StateVec {
        encode(self.bit(), self.basis())
    }

    pub fn label(self) -> &'static str {
        match self {
            Bb84State::Psi00 => "psi00",
            Bb84State::Psi10 => "psi10",
            Bb84State::Psi01 => "psi01",
            Bb84State::Psi11 => "psi11",
        }
    }
}

/// `|0⟩, |1⟩` for the computational basis and `|+⟩, |−⟩` for the diagonal one.
pub fn encode(bit: u8, basis: Basis) -> StateVec {
    let h = FRAC_1_SQRT_2;
    match (bit, basis) {
        (0, Basis::Computational) => StateVec::real(1.0, 0.0),
        (_, Basis::Computational) => StateVec::real(0.0, 1.0),
        (0, Basis::Diagonal) => StateVec::real(h, h),
        (_, Basis::Diagonal) => StateVec::real(h, -h),
    }
}

/// Hermitian Born-rule measurement; returns the bit read and the basis state
/// the qubit collapsed onto.
pub fn measure_in_basis<R: Rng + ?Sized>(state: StateVec, basis: Basis, rng: &mut R) -> Result<(u8, StateVec)> {
    let (outcome, _) = basis.measurement().measure(state, rng)?;
    let bit = match outcome {
        Outcome::Plus => 0,
        Outcome::Minus => 1,
    };
    Ok((bit, encode(bit, basis)))
}

/// Everything that happened to one qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitRecord {
    pub a: u8,
    pub b: u8,
    pub c: u8,
    /// Bob's bit; 0 when the qubit was lost.
    pub bob: u8,
    pub eve_bit: Option<u8>,
    pub eve_tag: Option<Tag>,
    pub eve_measurements: u32,
    pub lost: bool,
}

impl QubitRecord {
    pub fn sifted(&self) -> bool {
        self.b == self.c && !self.lost
    }
}

/// Sends qubit `index` of a run seeded with `seed`.
///
/// Draw order on the qubit's stream: `a`, `b`, `c`, then Eve's draws, then
/// Bob's measurement.
pub fn transmit(index: u64, seed: u64, eve: Option<&Strategy>) -> Result<QubitRecord> {
    let mut rng = qubit_rng(seed, index);
    let a = rng.random_range(0..2u8);
    let b = rng.random_range(0..2u8);
    let c = rng.random_range(0..2u8);
    let mut in_flight = Some(encode(a, Basis::from_bit(b)));
    let (mut eve_bit, mut eve_tag, mut eve_measurements) = (None, None, 0);

    if let Some(strategy) = eve {
        let outcome = strategy.intercept(encode(a, Basis::from_bit(b)), &mut rng)?;
        eve_bit = outcome.inferred_bit;
        eve_tag = Some(outcome.tag);
        eve_measurements = outcome.measurements;
        in_flight = outcome.resend;
    }

    let (bob, lost) = match in_flight {
        Some(state) => (measure_in_basis(state, Basis::from_bit(c), &mut rng)?.0, false),
        None => (0, true),
    };
    Ok(QubitRecord { a, b, c, bob, eve_bit, eve_tag, eve_measurements, lost })
}

/// Full record of one protocol run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    /// Alice's data bits.
    pub a: Vec<u8>,
    /// Alice's bases.
    pub b: Vec<u8>,
    /// Bob's bases.
    pub c: Vec<u8>,
    pub bob_bits: Vec<u8>,
    /// Eve's inferred bits; `None` entries are undecided.
    pub eve_bits: Option<Vec<Option<u8>>>,
    pub eve_tags: Option<Vec<Tag>>,
    pub lost: Vec<bool>,
}

impl Transcript {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn sifted_positions(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.b[i] == self.c[i] && !self.lost[i])
    }

    fn from_records(records: &[QubitRecord], with_eve: bool) -> Self {
        Self {
            a: records.iter().map(|r| r.a).collect(),
            b: records.iter().map(|r| r.b).collect(),
            c: records.iter().map(|r| r.c).collect(),
            bob_bits: records.iter().map(|r| r.bob).collect(),
            eve_bits: with_eve.then(|| records.iter().map(|r| r.eve_bit).collect()),
            eve_tags: with_eve.then(|| records.iter().filter_map(|r| r.eve_tag).collect()),
            lost: records.iter().map(|r| r.lost).collect(),
        }
    }
}

/// Runs `l` qubits through the channel, optionally intercepted by `eve`.
pub fn run_protocol(l: usize, eve: Option<&Strategy>, seed: u64) -> Result<Transcript> {
    let records = (0..l as u64).into_par_iter().map(|i| transmit(i, seed, eve)).collect::<Result<Vec<_>>>()?;
    Ok(Transcript::from_records(&records, eve.is_some()))
}

/// Keys kept after basis reconciliation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiftResult {
    pub alice_key: Vec<u8>,
    pub bob_key: Vec<u8>,
    pub eve_key: Option<Vec<Option<u8>>>,
    pub sifted_fraction: f64,
    /// `None` when nothing survived sifting.
    pub qber: Option<f64>,
}

impl SiftResult {
    /// Fraction of the sifted key Eve got right; undecided bits count as wrong.
    pub fn eve_accuracy(&self) -> Option<f64> {
        let eve = self.eve_key.as_ref()?;
        if eve.is_empty() {
            return None;
        }
        let hits = eve.iter().zip(&self.alice_key).filter(|(e, a)| **e == Some(**a)).count();
        Some(hits as f64 / eve.len() as f64)
    }
}

/// Keeps positions where the bases agree and the qubit arrived. QBER is taken
/// over the whole sifted key.
pub fn sift(t: &Transcript) -> SiftResult {
    let positions: Vec<usize> = t.sifted_positions().collect();
    let alice_key: Vec<u8> = positions.iter().map(|&i| t.a[i]).collect();
    let bob_key: Vec<u8> = positions.iter().map(|&i| t.bob_bits[i]).collect();
    let eve_key = t.eve_bits.as_ref().map(|eve| positions.iter().map(|&i| eve[i]).collect());
    let errors = alice_key.iter().zip(&bob_key).filter(|(a, b)| a != b).count();
    let sifted_fraction = if t.is_empty() { 0.0 } else { positions.len() as f64 / t.len() as f64 };
    let qber = (!positions.is_empty()).then(|| errors as f64 / positions.len() as f64);
    SiftResult { alice_key, bob_key, eve_key, sifted_fraction, qber }
}
