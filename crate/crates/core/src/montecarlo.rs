//! Seeded, parallel simulation harness.
//!
//! Each qubit draws from its own stream (see [`crate::stream`]) and results
//! are aggregated with integer counters, so the statistics are bit-identical
//! for any worker count. Every table row carries the exact enumeration value
//! next to the sampled one.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::bb84::transmit;
use crate::error::{Error, Result};
use crate::eve::{
    apply_efficiency, EfficiencyModel, FallbackPolicy, NullPolicy, ResendPolicy, Strategy, StrategySpec, Tag,
};

/// Accuracy at which a PT attack matches the Hermitian baseline.
pub const BREAK_EVEN_ACCURACY: f64 = 0.75;

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub qubits: u64,
    /// `None` runs the protocol without an eavesdropper.
    pub strategy: Option<StrategySpec>,
    pub eta: f64,
    pub null_policy: NullPolicy,
    pub fallback_policy: FallbackPolicy,
    pub resend: ResendPolicy,
    pub seed: u64,
    /// Thread count hint; 0 uses the global pool. Not part of the
    /// reproducible configuration since it cannot change results.
    #[serde(skip)]
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            qubits: 1_000_000,
            strategy: None,
            eta: 1.0,
            null_policy: NullPolicy::Wrong,
            fallback_policy: FallbackPolicy::None,
            resend: ResendPolicy::Invert,
            seed: 42,
            workers: 0,
        }
    }
}

impl RunConfig {
    pub fn with_strategy(strategy: StrategySpec) -> Self {
        Self { strategy: Some(strategy), ..Self::default() }
    }

    pub fn efficiency(&self) -> Result<EfficiencyModel> {
        EfficiencyModel::new(self.eta, self.null_policy, self.fallback_policy)
    }

    /// Strategy with efficiency and resend policy applied.
    pub fn build_strategy(&self) -> Result<Option<Strategy>> {
        self.strategy
            .map(|spec| Ok(apply_efficiency(spec.build()?.with_resend(self.resend), self.efficiency()?)))
            .transpose()
    }

    fn validate(&self) -> Result<()> {
        if self.qubits == 0 {
            return Err(Error::Domain("qubits must be at least 1".into()));
        }
        self.efficiency().map(|_| ())
    }
}

/// Point estimate with a Wilson 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    pub hits: u64,
    pub n: u64,
}

impl Estimate {
    pub fn new(hits: u64, n: u64) -> Result<Self> {
        let (lo, hi) = wilson_interval(hits, n, 0.95)?;
        Ok(Self { value: hits as f64 / n as f64, lo, hi, hits, n })
    }
}

/// Outcome of one [`simulate`] call.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub n: u64,
    pub sifted: u64,
    pub lost: u64,
    pub sifted_fraction: f64,
    /// `None` when nothing survived sifting.
    pub qber: Option<Estimate>,
    /// Eve's accuracy on sifted positions; absent without an eavesdropper.
    pub eve_accuracy: Option<Estimate>,
    /// Eve's accuracy over every transmitted qubit.
    pub eve_accuracy_all: Option<f64>,
    pub unambiguous_rate: Option<Estimate>,
    pub exact_accuracy: Option<f64>,
    pub exact_unambiguous_rate: Option<f64>,
    pub exact_qber: Option<f64>,
    /// Total measurements Eve performed.
    pub eve_measurements: Option<u64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Counters {
    n: u64,
    sifted: u64,
    sifted_errors: u64,
    eve_hits_sifted: u64,
    eve_hits_all: u64,
    unambiguous: u64,
    lost: u64,
    measurements: u64,
}

impl Counters {
    fn merge(self, o: Counters) -> Counters {
        Counters {
            n: self.n + o.n,
            sifted: self.sifted + o.sifted,
            sifted_errors: self.sifted_errors + o.sifted_errors,
            eve_hits_sifted: self.eve_hits_sifted + o.eve_hits_sifted,
            eve_hits_all: self.eve_hits_all + o.eve_hits_all,
            unambiguous: self.unambiguous + o.unambiguous,
            lost: self.lost + o.lost,
            measurements: self.measurements + o.measurements,
        }
    }
}

/// Runs `f` on a pool with `workers` threads, or on the global pool for 0.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Domain(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(f))
}

const BATCH: u64 = 4096;

fn count(cfg: &RunConfig, strategy: Option<&Strategy>) -> Result<Counters> {
    let (seed, n) = (cfg.seed, cfg.qubits);
    with_workers(cfg.workers, || {
        (0..n.div_ceil(BATCH))
            .into_par_iter()
            .map(|batch| {
                let mut acc = Counters::default();
                for i in batch * BATCH..((batch + 1) * BATCH).min(n) {
                    let r = transmit(i, seed, strategy)?;
                    let eve_hit = r.eve_bit == Some(r.a);
                    acc.n += 1;
                    acc.lost += r.lost as u64;
                    acc.eve_hits_all += eve_hit as u64;
                    acc.unambiguous += (r.eve_tag == Some(Tag::Unambiguous)) as u64;
                    acc.measurements += r.eve_measurements as u64;
                    if r.sifted() {
                        acc.sifted += 1;
                        acc.sifted_errors += (r.bob != r.a) as u64;
                        acc.eve_hits_sifted += eve_hit as u64;
                    }
                }
                Ok(acc)
            })
            .try_reduce(Counters::default, |a, b| Ok(a.merge(b)))
    })?
}

/// Runs the protocol for `cfg.qubits` qubits and summarizes it.
pub fn simulate(cfg: &RunConfig) -> Result<RunStats> {
    cfg.validate()?;
    let strategy = cfg.build_strategy()?;
    let c = count(cfg, strategy.as_ref())?;
    let exact = strategy.as_ref().map(Strategy::exact_figures).transpose()?;
    let with_eve = strategy.is_some();
    let sifted_estimate = |hits| (c.sifted > 0).then(|| Estimate::new(hits, c.sifted)).transpose();

    Ok(RunStats {
        n: c.n,
        sifted: c.sifted,
        lost: c.lost,
        sifted_fraction: c.sifted as f64 / c.n as f64,
        qber: sifted_estimate(c.sifted_errors)?,
        eve_accuracy: if with_eve { sifted_estimate(c.eve_hits_sifted)? } else { None },
        eve_accuracy_all: with_eve.then(|| c.eve_hits_all as f64 / c.n as f64),
        unambiguous_rate: with_eve.then(|| Estimate::new(c.unambiguous, c.n)).transpose()?,
        exact_accuracy: exact.map(|e| e.accuracy),
        exact_unambiguous_rate: exact.map(|e| e.unambiguous_rate),
        exact_qber: Some(exact.map_or(0.0, |e| e.qber)),
        eve_measurements: with_eve.then_some(c.measurements),
    })
}

/// Wilson score interval for `hits` successes out of `n`.
pub fn wilson_interval(hits: u64, n: u64, confidence: f64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::Domain("Wilson interval needs n ≥ 1".into()));
    }
    if hits > n {
        return Err(Error::Domain(format!("hits {hits} exceed trials {n}")));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::Domain(format!("confidence must lie in (0, 1), got {confidence}")));
    }
    let z = Normal::standard().inverse_cdf(0.5 + confidence / 2.0);
    let n_f = n as f64;
    let p = hits as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let centre = (p + z2 / (2.0 * n_f)) / denom;
    let half = z * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    let lo = if hits == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if hits == n { 1.0 } else { (centre + half).min(1.0) };
    Ok((lo, hi))
}

/// One row of an α or η sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub x: f64,
    pub feasible: bool,
    pub tau: Option<f64>,
    pub exact: Option<f64>,
    pub sampled: Option<f64>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

impl SweepRow {
    fn infeasible(x: f64) -> Self {
        Self { x, feasible: false, tau: None, exact: None, sampled: None, lo: None, hi: None }
    }

    fn sampled(x: f64, tau: Option<f64>, stats: &RunStats) -> Self {
        let acc = stats.eve_accuracy;
        Self {
            x,
            feasible: true,
            tau,
            exact: stats.exact_accuracy,
            sampled: acc.map(|e| e.value),
            lo: acc.map(|e| e.lo),
            hi: acc.map(|e| e.hi),
        }
    }
}

/// `steps` evenly spaced points from `from` to `to` inclusive.
pub fn grid(from: f64, to: f64, steps: usize) -> Result<Vec<f64>> {
    if from.is_nan() || to.is_nan() || from >= to || steps < 2 {
        return Err(Error::Domain(format!("grid needs from < to and steps ≥ 2, got [{from}, {to}] × {steps}")));
    }
    let h = (to - from) / (steps - 1) as f64;
    Ok((0..steps).map(|i| if i + 1 == steps { to } else { from + h * i as f64 }).collect())
}

/// Approach-3 accuracy against α. Points where the evolution time has no
/// solution are recorded as infeasible.
pub fn sweep_alpha(from: f64, to: f64, steps: usize, cfg: &RunConfig) -> Result<Vec<SweepRow>> {
    let (sigma, omega) = match cfg.strategy {
        Some(StrategySpec::Approach3 { sigma, omega, .. }) => (sigma, omega),
        other => {
            return Err(Error::Precondition(format!(
                "alpha sweeps need the approach3 strategy, got {}",
                other.map_or("none", |s| s.name())
            )))
        }
    };
    grid(from, to, steps)?
        .into_iter()
        .map(|alpha| {
            let spec = StrategySpec::Approach3 { alpha, sigma, omega };
            let strategy = match spec.build() {
                Ok(s) => s,
                Err(Error::NoSolution(_) | Error::Domain(_) | Error::SingularMetric(_)) => {
                    return Ok(SweepRow::infeasible(alpha))
                }
                Err(e) => return Err(e),
            };
            let stats = simulate(&RunConfig { strategy: Some(spec), ..*cfg })?;
            Ok(SweepRow::sampled(alpha, strategy.tau(), &stats))
        })
        .collect()
}

/// Result of an η sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaSweep {
    pub rows: Vec<SweepRow>,
    /// η where the exact accuracy crosses 0.75.
    pub threshold: Option<f64>,
    /// Same crossing on the sampled column.
    pub threshold_sampled: Option<f64>,
}

/// Accuracy against η under the count-as-wrong accounting.
pub fn sweep_eta(from: f64, to: f64, steps: usize, cfg: &RunConfig) -> Result<EtaSweep> {
    if cfg.strategy.is_none() {
        return Err(Error::Precondition("eta sweeps need an eavesdropping strategy".into()));
    }
    if cfg.null_policy != NullPolicy::Wrong || cfg.fallback_policy != FallbackPolicy::None {
        return Err(Error::Precondition("eta sweeps use null policy `wrong` with fallback `none`".into()));
    }
    let rows = grid(from, to, steps)?
        .into_iter()
        .map(|eta| {
            let run = RunConfig { eta, ..*cfg };
            let stats = simulate(&run)?;
            let tau = run.build_strategy()?.and_then(|s| s.tau());
            Ok(SweepRow::sampled(eta, tau, &stats))
        })
        .collect::<Result<Vec<_>>>()?;
    let threshold = crossing(&rows, |r| r.exact, BREAK_EVEN_ACCURACY);
    let threshold_sampled = crossing(&rows, |r| r.sampled, BREAK_EVEN_ACCURACY);
    Ok(EtaSweep { rows, threshold, threshold_sampled })
}

/// First linear-interpolated crossing of `level` along the rows.
pub fn crossing(rows: &[SweepRow], value: impl Fn(&SweepRow) -> Option<f64>, level: f64) -> Option<f64> {
    let points: Vec<(f64, f64)> = rows.iter().filter_map(|r| Some((r.x, value(r)? - level))).collect();
    if let Some(&(x, _)) = points.iter().find(|(_, d)| *d == 0.0) {
        return Some(x);
    }
    points.windows(2).find_map(|w| {
        let ((x0, d0), (x1, d1)) = (w[0], w[1]);
        (d0.signum() != d1.signum()).then(|| x0 + (x1 - x0) * d0 / (d0 - d1))
    })
}

/// Nine significant digits, locale-independent.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{:.8}", x);
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (8 - magnitude).max(0) as usize;
    format!("{:.*}", decimals, x)
}

fn opt(x: Option<f64>) -> String {
    x.map(format_sig9).unwrap_or_default()
}

/// Writes an α sweep as `alpha,feasible,tau,exact,sampled,lo,hi`.
pub fn write_alpha_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Domain(format!("csv write failed: {e}"));
    w.write_record(["alpha", "feasible", "tau", "exact", "sampled", "lo", "hi"]).map_err(io)?;
    for r in rows {
        w.write_record([
            format_sig9(r.x),
            r.feasible.to_string(),
            opt(r.tau),
            opt(r.exact),
            opt(r.sampled),
            opt(r.lo),
            opt(r.hi),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Domain(format!("csv flush failed: {e}")))
}

/// Writes an η sweep as `eta,exact,sampled,lo,hi`.
pub fn write_eta_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Domain(format!("csv write failed: {e}"));
    w.write_record(["eta", "exact", "sampled", "lo", "hi"]).map_err(io)?;
    for r in rows {
        w.write_record([format_sig9(r.x), opt(r.exact), opt(r.sampled), opt(r.lo), opt(r.hi)]).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Domain(format!("csv flush failed: {e}")))
}
