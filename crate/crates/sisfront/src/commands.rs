//! Subcommand implementations. Each writes its artifacts into an
//! [`OutputDir`] and returns the lines to print.

use std::thread;

use sisfront_core::dynamics::{self, find_mu_star, simulate_and_classify, Outcome, Verdict};
use sisfront_core::frontfix::Trajectory;
use sisfront_core::semiwave::{self, Direction, SemiWaveConfig};
use sisfront_core::spectral::{self, check_monotone, SpectralConfig};
use sisfront_core::steady::solve_equilibrium_with;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::executor::ThreadedExecutor;
use crate::output::{self, OutputDir, ThresholdReport, VerdictReport};

/// A loaded config and the hash recorded next to every artifact.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub config: RunConfig,
    pub hash: String,
}

impl Loaded {
    pub fn from_bytes(config: RunConfig, bytes: &[u8]) -> Self {
        Loaded {
            config,
            hash: output::sha256_hex(bytes),
        }
    }

    /// Hash of the canonical JSON form, for configs built in code.
    pub fn canonical(config: RunConfig) -> Self {
        let bytes = serde_json::to_vec(&config).expect("config serialises");
        Self::from_bytes(config, &bytes)
    }
}

/// Printed summary plus the verdict that decides the exit code, if any.
#[derive(Debug, Default)]
pub struct Report {
    pub lines: Vec<String>,
    pub inconclusive: Option<String>,
}

impl Report {
    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }
}

fn write_trajectory(out: &mut OutputDir, prefix: &str, hash: &str, traj: &Trajectory) -> Result<(), CliError> {
    out.csv(
        &format!("{prefix}fronts.csv"),
        "fronts",
        hash,
        &output::fronts_table(traj),
    )?;
    out.csv(
        &format!("{prefix}r0_series.csv"),
        "r0_series",
        hash,
        &output::r0_series_table(traj),
    )?;
    for snap in &traj.snapshots {
        let name = format!("{prefix}{}", output::profile_name(snap));
        out.csv(&name, "profile", hash, &output::profile_table(snap))?;
    }
    Ok(())
}

fn trajectory_lines(report: &mut Report, traj: &Trajectory) {
    let f = traj.final_front();
    let d = &traj.diagnostics;
    report.line(format!(
        "t = {:.4}: g = {:.6}, h = {:.6}, sup I = {:.6e}",
        f.t,
        f.g,
        f.h,
        traj.front_history.last().map_or(f64::NAN, |r| r.sup_i)
    ));
    report.line(format!(
        "steps {} (halvings {}, clipped {}), max |front speed| {:.4} (bound {:.4})",
        d.accepted_steps, d.halvings, d.clipped_steps, d.max_speed, d.velocity_bound
    ));
    if d.peclet_warnings > 0 {
        report.line(format!(
            "warning: cell Peclet number above 2 on {} steps; refine n",
            d.peclet_warnings
        ));
    }
    if d.bound_violations > 0 {
        report.line(format!(
            "warning: front speed above the a-priori bound on {} steps",
            d.bound_violations
        ));
    }
    if d.monotonicity_violations > 0 {
        report.line(format!(
            "warning: {} steps without outward front motion",
            d.monotonicity_violations
        ));
    }
}

fn run_classified(cfg: &RunConfig, t_end: f64) -> Result<(Trajectory, Outcome), CliError> {
    let spec = cfg.valid_spec()?;
    Ok(simulate_and_classify(&spec, &cfg.probe_settings(), t_end, false)?)
}

pub fn simulate(loaded: &Loaded, out: &mut OutputDir, t_end: Option<f64>) -> Result<Report, CliError> {
    let cfg = &loaded.config;
    let (traj, _) = run_classified(cfg, t_end.unwrap_or(cfg.numerics.t_end))?;
    write_trajectory(out, "", &loaded.hash, &traj)?;
    let mut report = Report::default();
    trajectory_lines(&mut report, &traj);
    Ok(report)
}

pub fn classify(loaded: &Loaded, out: &mut OutputDir, t_end: Option<f64>) -> Result<Report, CliError> {
    let cfg = &loaded.config;
    let (traj, outcome) = run_classified(cfg, t_end.unwrap_or(cfg.numerics.t_end))?;
    write_trajectory(out, "", &loaded.hash, &traj)?;
    out.json(
        "verdict.json",
        "verdict",
        &loaded.hash,
        &VerdictReport::new(&outcome, &traj),
    )?;
    let mut report = Report::default();
    trajectory_lines(&mut report, &traj);
    report.line(output::describe(&outcome));
    if outcome.verdict == Verdict::Undetermined {
        report.inconclusive = Some(String::from("classification undetermined; extend numerics.t_end"));
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum R0Mode {
    Interval,
    Series,
    Probe,
}

#[derive(serde::Serialize)]
struct IntervalReport {
    g: f64,
    h: f64,
    r0: f64,
    lambda0: f64,
    sign_consistent: bool,
}

pub fn r0(
    loaded: &Loaded,
    out: &mut OutputDir,
    mode: R0Mode,
    interval: Option<(f64, f64)>,
) -> Result<Report, CliError> {
    let cfg = &loaded.config;
    let spec = cfg.spec()?;
    let spectral: SpectralConfig = (&cfg.spectral).into();
    let interval = interval.unwrap_or((-spec.h0, spec.h0));
    let mut report = Report::default();
    match mode {
        R0Mode::Interval => {
            let res = spectral::analyze(interval, &spec, &spectral)?;
            let consistent = (1.0 - res.r0).signum() == res.lambda0.signum() || (1.0 - res.r0).abs() <= 1e-8;
            report.line(format!("R0 on ({}, {}) = {:.12}", interval.0, interval.1, res.r0));
            report.line(format!(
                "principal eigenvalue lambda0 = {:.12}; sign(1 - R0) = sign(lambda0): {}",
                res.lambda0,
                if consistent { "yes" } else { "NO" }
            ));
            out.json(
                "r0_interval.json",
                "r0_interval",
                &loaded.hash,
                &IntervalReport {
                    g: interval.0,
                    h: interval.1,
                    r0: res.r0,
                    lambda0: res.lambda0,
                    sign_consistent: consistent,
                },
            )?;
            if !consistent {
                return Err(CliError::Numeric(String::from("R0 and lambda0 disagree in sign")));
            }
        }
        R0Mode::Series => {
            let (traj, _) = run_classified(cfg, cfg.numerics.t_end)?;
            out.csv(
                "r0_series.csv",
                "r0_series",
                &loaded.hash,
                &output::r0_series_table(&traj),
            )?;
            let series = &traj.r0f_history;
            if let (Some(first), Some(last)) = (series.first(), series.last()) {
                report.line(format!(
                    "R0F({}) = {:.8} ... R0F({}) = {:.8} ({} samples)",
                    first.0,
                    first.1,
                    last.0,
                    last.1,
                    series.len()
                ));
            }
            match check_monotone(series) {
                Ok(()) => report.line("series is increasing"),
                Err(e) => return Err(CliError::Numeric(e.to_string())),
            }
        }
        R0Mode::Probe => {
            let probe = spectral::r0_properties_probe(&spec, interval, &spectral)?;
            out.csv(
                "r0_probe.csv",
                "r0_probe",
                &loaded.hash,
                &output::r0_probe_table(&probe),
            )?;
            for c in &probe.checks {
                report.line(format!(
                    "[{}] {}: {}",
                    if c.passed { "pass" } else { "FAIL" },
                    c.name,
                    c.detail
                ));
            }
            if !probe.all_passed() {
                return Err(CliError::Numeric(String::from("R0 property probe failed")));
            }
        }
    }
    Ok(report)
}

pub fn semiwave(loaded: &Loaded, out: &mut OutputDir, profiles: bool) -> Result<Report, CliError> {
    let cfg = &loaded.config;
    let spec = cfg.valid_spec()?;
    let sw: SemiWaveConfig = (&cfg.semiwave).into();
    let results = [
        semiwave::speed(Direction::Rightward, &spec, &sw)?,
        semiwave::speed(Direction::Leftward, &spec, &sw)?,
    ];
    out.csv(
        "semiwave.csv",
        "semiwave",
        &loaded.hash,
        &output::semiwave_table(&results),
    )?;
    let rates = spec.bulk_rates()?;
    let mut report = Report::default();
    for r in &results {
        report.line(format!(
            "{}: k* = {:.10}, q'(0) = {:.10}, limit {:.6}",
            r.direction,
            r.k_star,
            r.slope0,
            r.direction.speed_limit(rates.c_fisher, spec.alpha)
        ));
        if profiles {
            let name = format!("semiwave_profile_{}.csv", r.direction);
            out.csv(
                &name,
                "semiwave_profile",
                &loaded.hash,
                &output::semiwave_profile_table(r),
            )?;
        }
    }
    Ok(report)
}

pub fn equilibrium(
    loaded: &Loaded,
    out: &mut OutputDir,
    l: Option<f64>,
    cells: Option<usize>,
) -> Result<Report, CliError> {
    let cfg = &loaded.config;
    let spec = cfg.valid_spec()?;
    let l = l.unwrap_or(cfg.equilibrium.l);
    let cells = cells.unwrap_or(cfg.equilibrium.cells);
    let eq = solve_equilibrium_with(&spec, l, cells, &cfg.steady_config())?;
    out.csv(
        "equilibrium.csv",
        "equilibrium",
        &loaded.hash,
        &output::equilibrium_table(&eq),
    )?;
    let mut report = Report::default();
    report.line(format!(
        "I* on [-{l}, {l}] with {cells} cells: min {:.10}, max {:.10}, residual {:.2e}, far field a/b = {:.10}",
        eq.min(),
        eq.max(),
        eq.residual,
        spec.bulk_rates()?.carrying()
    ));
    Ok(report)
}

pub fn threshold(
    loaded: &Loaded,
    out: &mut OutputDir,
    bracket: Option<(f64, f64)>,
    width: Option<f64>,
    workers: Option<usize>,
) -> Result<Report, CliError> {
    let cfg = &loaded.config;
    let spec = cfg.valid_spec()?;
    let bracket = bracket.unwrap_or((cfg.threshold.bracket[0], cfg.threshold.bracket[1]));
    let mut settings = cfg.threshold_settings();
    if let Some(w) = width {
        settings.width = w;
    }
    let executor = ThreadedExecutor::new(workers.unwrap_or(cfg.threshold.workers));
    let result = find_mu_star(&spec, bracket, &settings, &executor)?;
    out.csv(
        "mu_scan.csv",
        "mu_scan",
        &loaded.hash,
        &output::mu_scan_table(&result.probes),
    )?;
    out.json(
        "threshold.json",
        "threshold",
        &loaded.hash,
        &ThresholdReport::from(&result),
    )?;
    let mut report = Report::default();
    if result.spreads_for_all_mu {
        report.line("R0F(0) >= 1: spreading for every mu > 0, mu* = 0");
    } else {
        report.line(format!(
            "mu* in [{:.6}, {:.6}] (midpoint {:.6}) after {} probes",
            result.interval.0,
            result.interval.1,
            result.mu_star,
            result.probes.len()
        ));
    }
    Ok(report)
}

/// The four runs of the reference examples: `mu` in {1, 6}, `alpha = +-1.5`.
pub const REFERENCE_RUNS: [(f64, f64); 4] = [(6.0, 1.5), (6.0, -1.5), (1.0, 1.5), (1.0, -1.5)];

pub fn run_label(mu: f64, alpha: f64) -> String {
    format!("mu{mu}_alpha{alpha:+}")
}

pub fn reproduce_reference(base: &RunConfig, out: &mut OutputDir, t_end: Option<f64>) -> Result<Report, CliError> {
    let t_end = t_end.unwrap_or(base.numerics.t_end);
    let configs: Vec<Loaded> = REFERENCE_RUNS
        .iter()
        .map(|&(mu, alpha)| {
            Loaded::canonical(RunConfig {
                mu,
                alpha,
                ..base.clone()
            })
        })
        .collect();
    let results: Vec<Result<(Trajectory, Outcome), CliError>> = thread::scope(|s| {
        let handles: Vec<_> = configs
            .iter()
            .map(|l| s.spawn(move || run_classified(&l.config, t_end)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("run thread panicked"))
            .collect()
    });
    let mut summary = output::Table::new(&["mu", "alpha", "verdict", "t0_or_blank", "g", "h"]);
    let mut report = Report::default();
    for (loaded, result) in configs.iter().zip(results) {
        let (traj, outcome) = result?;
        let cfg = &loaded.config;
        let prefix = format!("{}/", run_label(cfg.mu, cfg.alpha));
        write_trajectory(out, &prefix, &loaded.hash, &traj)?;
        out.json(
            &format!("{prefix}verdict.json"),
            "verdict",
            &loaded.hash,
            &VerdictReport::new(&outcome, &traj),
        )?;
        let t0 = match outcome.certificate {
            dynamics::Certificate::Spreading { t0, .. } => output::num(t0),
            _ => String::new(),
        };
        let f = traj.final_front();
        summary.row([
            output::num(cfg.mu),
            output::num(cfg.alpha),
            outcome.verdict.as_str().to_string(),
            t0,
            output::num(f.g),
            output::num(f.h),
        ]);
        report.line(format!(
            "mu = {}, alpha = {:+}: {}; fronts at t = {}: ({:.4}, {:.4})",
            cfg.mu,
            cfg.alpha,
            output::describe(&outcome),
            f.t,
            f.g,
            f.h
        ));
        if outcome.verdict == Verdict::Undetermined {
            report.inconclusive = Some(format!("{} undetermined; extend t_end", run_label(cfg.mu, cfg.alpha)));
        }
    }
    let hash = output::sha256_hex(&serde_json::to_vec(base).expect("config serialises"));
    out.csv("summary.csv", "summary", &hash, &summary)?;
    Ok(report)
}
