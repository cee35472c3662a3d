//! Front end for the `ptqkd` binary. [`main_with`] parses arguments, runs the
//! command and returns the process exit code: 0 on success, 1 when a
//! verification check fails, 2 on usage errors.

pub mod angles;
pub mod args;
pub mod report;
pub mod verify;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::Parser;
use ptqkd_core::montecarlo::{format_sig9, write_alpha_csv, write_eta_csv};
use ptqkd_core::{alpha_optimal, simulate, sweep_alpha, sweep_eta, RunConfig, StrategySpec, SweepRow};
use serde::Serialize;

use args::{
    AnglesArgs, Cli, Command, Format, RunArgs, SimArgs, StrategyName, StrategyParams, SweepAlphaArgs, SweepEtaArgs,
    TableFormat, VerifyArgs,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Verify(a) => cmd_verify(&a),
        Command::Run(a) => cmd_run(&a).map(|_| EXIT_OK),
        Command::SweepAlpha(a) => cmd_sweep_alpha(&a).map(|_| EXIT_OK),
        Command::SweepEta(a) => cmd_sweep_eta(&a).map(|_| EXIT_OK),
        Command::Angles(a) => cmd_angles(&a).map(|_| EXIT_OK),
    }
}

/// Writes to `path`, or to standard output when absent.
fn emit(path: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let mut f = BufWriter::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?);
            write(&mut f)?;
            f.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

/// Resolves the strategy flags, rejecting parameters the strategy does not take.
pub fn strategy_spec(name: StrategyName, p: &StrategyParams) -> Result<Option<StrategySpec>> {
    let given = [
        ("--alpha", p.alpha.is_some()),
        ("--rho", p.rho.is_some()),
        ("--sigma", p.sigma.is_some()),
        ("--omega", p.omega.is_some()),
        ("--epsilon", p.epsilon.is_some()),
    ];
    let allowed: &[&str] = match name {
        StrategyName::None | StrategyName::Hermitian => &[],
        StrategyName::Approach1 => &["--epsilon"],
        StrategyName::Approach2 => &["--alpha", "--rho"],
        StrategyName::Approach3 => &["--alpha", "--sigma", "--omega"],
    };
    if let Some((flag, _)) = given.iter().find(|(flag, set)| *set && !allowed.contains(flag)) {
        bail!("{flag} does not apply to strategy `{}`", name.as_str());
    }
    let Some(spec) = StrategySpec::from_name(name.as_str())? else { return Ok(None) };
    Ok(Some(match spec {
        StrategySpec::Hermitian => spec,
        StrategySpec::Approach1 { epsilon } => StrategySpec::Approach1 { epsilon: p.epsilon.unwrap_or(epsilon) },
        StrategySpec::Approach2 { alpha, rho } => {
            StrategySpec::Approach2 { alpha: p.alpha.unwrap_or(alpha), rho: p.rho.unwrap_or(rho) }
        }
        StrategySpec::Approach3 { alpha, sigma, omega } => StrategySpec::Approach3 {
            alpha: p.alpha.unwrap_or(alpha),
            sigma: p.sigma.unwrap_or(sigma),
            omega: p.omega.unwrap_or(omega),
        },
    }))
}

fn run_config(strategy: Option<StrategySpec>, qubits: u64, sim: &SimArgs) -> Result<RunConfig> {
    if strategy.is_none() {
        for (flag, set) in [
            ("--eta", sim.eta.is_some()),
            ("--null", sim.null_policy.is_some()),
            ("--fallback", sim.fallback_policy.is_some()),
        ] {
            if set {
                bail!("{flag} needs an eavesdropping strategy");
            }
        }
    }
    let d = RunConfig::default();
    let cfg = RunConfig {
        qubits,
        strategy,
        eta: sim.eta.unwrap_or(d.eta),
        null_policy: sim.null_policy.map_or(d.null_policy, Into::into),
        fallback_policy: sim.fallback_policy.map_or(d.fallback_policy, Into::into),
        resend: sim.resend.into(),
        seed: sim.seed,
        workers: sim.workers,
    };
    if cfg.qubits == 0 {
        bail!("--qubits must be at least 1");
    }
    cfg.efficiency()?;
    // Surface construction errors (singular metric, no evolution time, ...) as usage errors.
    cfg.build_strategy()?;
    Ok(cfg)
}

/// Reads a configuration echo, either bare or inside a report.
fn load_config(path: &Path, workers: usize) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("{} is not JSON", path.display()))?;
    if let Some(inner) = value.get_mut("config") {
        value = inner.take();
    }
    let cfg = RunConfig { workers, ..serde_json::from_value(value).context("invalid run configuration")? };
    if cfg.qubits == 0 {
        bail!("qubits must be at least 1");
    }
    cfg.build_strategy()?;
    Ok(cfg)
}

fn cmd_run(a: &RunArgs) -> Result<()> {
    let cfg = match (&a.config, a.strategy) {
        (Some(path), _) => load_config(path, a.sim.workers)?,
        (None, Some(name)) => run_config(strategy_spec(name, &a.params)?, a.qubits, &a.sim)?,
        (None, None) => bail!("--strategy is required"),
    };
    let tau = cfg.build_strategy()?.and_then(|s| s.tau());
    let stats = simulate(&cfg)?;
    let report = report::build(&cfg, stats, tau);
    emit(a.out.as_deref(), |out| match a.format {
        Format::Json => write_json(out, &report),
        Format::Csv => Ok(report::write_csv(&report, out)?),
    })
}

#[derive(Serialize)]
struct SweepReport<'a> {
    command: &'static str,
    from: f64,
    to: f64,
    steps: usize,
    config: RunConfig,
    rows: &'a [SweepRow],
    #[serde(skip_serializing_if = "Option::is_none")]
    threshold: Option<Option<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    threshold_sampled: Option<Option<f64>>,
}

fn gnuplot_value(x: Option<f64>) -> String {
    x.map_or_else(|| "NaN".into(), format_sig9)
}

fn write_gnuplot(path: &Path, header: &[String], columns: &str, rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    emit(Some(path), |out| {
        for line in header {
            writeln!(out, "# {line}")?;
        }
        writeln!(out, "# {columns}")?;
        for row in rows {
            writeln!(out, "{}", row.join(" "))?;
        }
        Ok(())
    })
}

fn cmd_sweep_alpha(a: &SweepAlphaArgs) -> Result<()> {
    let params = StrategyParams { sigma: a.sigma, omega: a.omega, ..Default::default() };
    let spec = strategy_spec(StrategyName::Approach3, &params)?;
    // Validate against a feasible α; infeasible grid points are recorded, not fatal.
    let probe = spec.map(|s| match s {
        StrategySpec::Approach3 { sigma, omega, .. } => {
            StrategySpec::Approach3 { alpha: alpha_optimal(), sigma, omega }
        }
        other => other,
    });
    let cfg = RunConfig { strategy: spec, ..run_config(probe, a.qubits, &a.sim)? };
    let rows = sweep_alpha(a.from, a.to, a.steps, &cfg)?;
    if !rows.iter().any(|r| r.feasible) {
        eprintln!("warning: no feasible alpha in [{}, {}]", a.from, a.to);
    }
    emit(a.out.as_deref(), |out| match a.format {
        Format::Csv => Ok(write_alpha_csv(&rows, out)?),
        Format::Json => write_json(
            out,
            &SweepReport {
                command: "sweep-alpha",
                from: a.from,
                to: a.to,
                steps: a.steps,
                config: cfg,
                rows: &rows,
                threshold: None,
                threshold_sampled: None,
            },
        ),
    })?;
    if let Some(path) = &a.gnuplot {
        let header = vec![
            "ptqkd sweep-alpha: approach3 accuracy against alpha".to_string(),
            format!("qubits per row {}, seed {}, eta {}", cfg.qubits, cfg.seed, cfg.eta),
            "infeasible rows carry NaN".to_string(),
        ];
        let lines = rows.iter().map(|r| {
            vec![
                format_sig9(r.x),
                (r.feasible as u8).to_string(),
                gnuplot_value(r.tau),
                gnuplot_value(r.exact),
                gnuplot_value(r.sampled),
                gnuplot_value(r.lo),
                gnuplot_value(r.hi),
            ]
        });
        write_gnuplot(path, &header, "alpha feasible tau exact sampled lo hi", lines)?;
    }
    Ok(())
}

/// `eta*=0.900`, or `eta*=none` without a crossing.
pub fn threshold_line(threshold: Option<f64>) -> String {
    match threshold {
        Some(t) => format!("eta*={t:.3}"),
        None => "eta*=none".into(),
    }
}

fn cmd_sweep_eta(a: &SweepEtaArgs) -> Result<()> {
    if a.sim.eta.is_some() {
        bail!("--eta is swept; use --from and --to");
    }
    if a.strategy == StrategyName::None {
        bail!("sweep-eta needs an eavesdropping strategy");
    }
    let cfg = run_config(strategy_spec(a.strategy, &a.params)?, a.qubits, &a.sim)?;
    let sweep = sweep_eta(a.from, a.to, a.steps, &cfg)?;
    let line = threshold_line(sweep.threshold);
    emit(a.out.as_deref(), |out| match a.format {
        Format::Csv => Ok(write_eta_csv(&sweep.rows, out)?),
        Format::Json => write_json(
            out,
            &SweepReport {
                command: "sweep-eta",
                from: a.from,
                to: a.to,
                steps: a.steps,
                config: cfg,
                rows: &sweep.rows,
                threshold: Some(sweep.threshold),
                threshold_sampled: Some(sweep.threshold_sampled),
            },
        ),
    })?;
    // Keep standard output parseable when it carries the table.
    if a.out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
    if sweep.threshold.is_none() {
        eprintln!("warning: accuracy does not cross 0.75 on [{}, {}]", a.from, a.to);
    }
    if let Some(path) = &a.gnuplot {
        let header = vec![
            format!("ptqkd sweep-eta: {} accuracy against eta", a.strategy.as_str()),
            format!("qubits per row {}, seed {}", cfg.qubits, cfg.seed),
            line.clone(),
        ];
        let lines = sweep.rows.iter().map(|r| {
            vec![
                format_sig9(r.x),
                gnuplot_value(r.exact),
                gnuplot_value(r.sampled),
                gnuplot_value(r.lo),
                gnuplot_value(r.hi),
            ]
        });
        write_gnuplot(path, &header, "eta exact sampled lo hi", lines)?;
    }
    Ok(())
}

fn cmd_verify(a: &VerifyArgs) -> Result<i32> {
    if a.samples == 0 {
        bail!("--samples must be at least 1");
    }
    let checks = verify::run_suite(a.samples, a.seed);
    let all = checks.iter().all(|c| c.passed);
    match a.format {
        TableFormat::Json => {
            #[derive(Serialize)]
            struct VerifyReport<'a> {
                command: &'static str,
                samples: usize,
                seed: u64,
                passed: bool,
                checks: &'a [verify::Check],
            }
            write_json(
                &mut io::stdout().lock(),
                &VerifyReport { command: "verify", samples: a.samples, seed: a.seed, passed: all, checks: &checks },
            )?;
        }
        TableFormat::Text => {
            let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
            println!("{:<width$}  {:>7}  {:>10}  {:>9}  result", "check", "samples", "measured", "tolerance");
            for c in &checks {
                println!(
                    "{:<width$}  {:>7}  {:>10.3e}  {:>9.1e}  {}",
                    c.name,
                    c.samples,
                    c.measured,
                    c.tolerance,
                    if c.passed { "pass" } else { "FAIL" }
                );
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            println!("{} checks, {} failed", checks.len(), failed);
        }
    }
    Ok(if all { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_angles(a: &AnglesArgs) -> Result<()> {
    let rows = angles::table(a.alpha, a.rho)?;
    match a.format {
        TableFormat::Json => {
            #[derive(Serialize)]
            struct AnglesReport<'a> {
                command: &'static str,
                alpha: f64,
                rho: f64,
                rows: &'a [angles::AngleRow],
            }
            write_json(
                &mut io::stdout().lock(),
                &AnglesReport { command: "angles", alpha: a.alpha, rho: a.rho, rows: &rows },
            )?;
        }
        TableFormat::Text => {
            println!("alpha = {}, rho = {}", format_sig9(a.alpha), format_sig9(a.rho));
            println!("{:<16}  {:>13}  {:>13}  {:>10}", "pair", "closed form", "direct", "difference");
            for r in &rows {
                let flag = if r.same_sign { "" } else { "  (opposite sign)" };
                println!("{:<16}  {:>13.9}  {:>13.9}  {:>10.3e}{flag}", r.pair, r.closed_form, r.direct, r.difference);
            }
        }
    }
    Ok(())
}
