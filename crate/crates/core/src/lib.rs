//! BB84 quantum key distribution under PT-symmetric state-discrimination
//! attacks.
//!
//! The crate is organized bottom-up:
//!
//! * [`qmath`]: 2×2 complex linear algebra.
//! * [`ptcore`]: the PT-symmetric Hamiltonian, its `C` operator, the CPT
//!   inner product and projectors, and non-unitary evolution.
//! * [`bb84`]: encoding, Bob's measurement, sifting and QBER.
//! * [`eve`]: the Hermitian intercept-resend baseline and three PT attacks.
//! * [`montecarlo`]: seeded parallel runs and parameter sweeps.

pub mod bb84;
pub mod error;
pub mod eve;
pub mod montecarlo;
pub mod ptcore;
pub mod qmath;
pub mod stream;

pub use bb84::{encode, measure_in_basis, run_protocol, sift, Basis, Bb84State, SiftResult, Transcript};
pub use error::{Error, Result};
pub use eve::{
    apply_efficiency, approach1_strategy, approach2_strategy, approach3_strategy, exact_accuracy, hermitian_strategy,
    EfficiencyModel, EveOutcome, FallbackPolicy, NullPolicy, ResendPolicy, Strategy, StrategySpec, Tag,
};
pub use montecarlo::{simulate, sweep_alpha, sweep_eta, wilson_interval, EtaSweep, RunConfig, RunStats, SweepRow};
pub use ptcore::{
    alpha_of, alpha_optimal, approach3_time, c_operator, cpt_cosine, cpt_inner, cpt_measure, cpt_projector,
    evolution_operator, evolved_metric, omega_of, CptMetric, MeasurementPair, Metric, Outcome, PtParams,
};
pub use qmath::{approx_eq, herm_inner, herm_projector, mat_apply, ApproxEq, Complex, Mat2, StateVec};
