//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Criteria can be selected by number: `cargo test -p sisfront --test
//! acceptance -- 1 2 5`. Criteria 7 and 8 inspect whichever runs the
//! selected criteria produced.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use sisfront::ThreadedExecutor;
use sisfront_core::dynamics::{
    self, find_mu_star, probe_mu, simulate_and_classify, Certificate, Outcome, ProbeSettings, ThresholdSettings,
    Verdict,
};
use sisfront_core::frontfix::{Numerics, Trajectory};
use sisfront_core::semiwave::{self, Direction, SemiWaveConfig};
use sisfront_core::spectral::{principal_eigenvalue, r0_dirichlet_advection, SpectralConfig};
use sisfront_core::ModelSpec;

const R0_TOL: f64 = 1e-6;
const SIGN_SLACK: f64 = 1e-8;
const SPEED_REL_TOL: f64 = 0.10;
const ORDER_SLACK: f64 = 1e-6;
const MONOTONE_SLACK: f64 = 1e-8;
const BOUND_TOL: f64 = 1e-8;
const THRESHOLD_WIDTH: f64 = 0.25;
const ATTRACTOR_TOL: f64 = 1e-2;

struct Run {
    label: String,
    spec: ModelSpec,
    trajectory: Trajectory,
    outcome: Outcome,
}

#[derive(Default)]
struct Suite {
    runs: Vec<Run>,
    /// Index of the constant-coefficient spreading run shared by 5 and 10.
    constant_run: Option<usize>,
    failures: usize,
}

type Criterion = fn(&mut Suite);

struct Check {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: String) -> Check {
    Check { pass, detail }
}

impl Suite {
    fn report(&mut self, number: u32, name: &str, started: Instant, budget: Option<Duration>, v: Check) {
        let elapsed = started.elapsed();
        let in_time = budget.is_none_or(|b| elapsed <= b);
        let pass = v.pass && in_time;
        if !pass {
            self.failures += 1;
        }
        let budget = budget.map_or(String::new(), |b| format!(" / {:.0?}", b));
        let late = if in_time { "" } else { " [over time budget]" };
        println!(
            "criterion {number:>2} {:<4} {name}: {} ({elapsed:.2?}{budget}){late}",
            if pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }

    fn simulate(
        &mut self,
        label: String,
        spec: ModelSpec,
        settings: &ProbeSettings,
        t_end: f64,
    ) -> Result<usize, String> {
        let (trajectory, outcome) =
            simulate_and_classify(&spec, settings, t_end, false).map_err(|e| format!("{label}: {e}"))?;
        self.runs.push(Run {
            label,
            spec,
            trajectory,
            outcome,
        });
        Ok(self.runs.len() - 1)
    }
}

fn default_settings() -> ProbeSettings {
    ProbeSettings::default()
}

fn constant_spec(alpha: f64, mu: f64) -> ModelSpec {
    ModelSpec::constant(4.0, alpha, mu, 2.0, 1.0, 4.0, 1.0)
}

fn criterion_1(suite: &mut Suite) {
    let started = Instant::now();
    let config = SpectralConfig::default();
    let cases = [
        (0.0, 4.0 / (PI * PI + 1.0)),
        (1.5, 4.0 / (PI * PI + 1.5 * 1.5 / 16.0 + 1.0)),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (alpha, exact) in cases {
        match r0_dirichlet_advection((-1.0, 1.0), &constant_spec(alpha, 1.0), &config) {
            Ok(r) => {
                let err = (r.r0 - exact).abs();
                pass &= err <= R0_TOL;
                parts.push(format!("alpha={alpha}: R0={:.10} err={err:.1e}", r.r0));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("alpha={alpha}: {e}"));
            }
        }
    }
    let v = check(pass, format!("{} (tol {R0_TOL:e})", parts.join(", ")));
    suite.report(1, "closed-form R0", started, Some(Duration::from_secs(1)), v);
}

fn criterion_2(suite: &mut Suite) {
    let started = Instant::now();
    let config = SpectralConfig::default();
    let lengths = [1.0, 2.0, 3.5, 5.0, 8.0];
    let alphas = [0.0, 0.5, 1.0, 1.5];
    let (mut checked, mut exceptions, mut skipped) = (0, Vec::new(), 0);
    for &len in &lengths {
        for &alpha in &alphas {
            let spec = ModelSpec::reference(1.0, alpha);
            let interval = (-0.5 * len, 0.5 * len);
            let lambda = principal_eigenvalue(interval, &spec, &config).map(|e| e.lambda0);
            let r0 = r0_dirichlet_advection(interval, &spec, &config).map(|r| r.r0);
            match (lambda, r0) {
                (Ok(lambda), Ok(r0)) => {
                    if (1.0 - r0).abs() <= SIGN_SLACK {
                        skipped += 1;
                        continue;
                    }
                    checked += 1;
                    if (1.0 - r0).signum() != lambda.signum() {
                        exceptions.push(format!("L={len} alpha={alpha}: R0={r0} lambda0={lambda}"));
                    }
                }
                (Err(e), _) | (_, Err(e)) => exceptions.push(format!("L={len} alpha={alpha}: {e}")),
            }
        }
    }
    let detail = if exceptions.is_empty() {
        format!("{checked} ladder points agree, {skipped} within {SIGN_SLACK:e} of 1")
    } else {
        format!("{} exceptions: {}", exceptions.len(), exceptions.join("; "))
    };
    let v = check(exceptions.is_empty() && checked + skipped == 20, detail);
    suite.report(2, "sign relation", started, Some(Duration::from_secs(10)), v);
}

fn criterion_3(suite: &mut Suite) {
    let started = Instant::now();
    let t_end = 10.0;
    let settings = default_settings();
    let mut pass = true;
    let mut parts = Vec::new();
    for alpha in [1.5, -1.5] {
        let spec = ModelSpec::reference(6.0, alpha);
        let idx = match suite.simulate(format!("reference mu=6 alpha={alpha:+}"), spec, &settings, t_end) {
            Ok(i) => i,
            Err(e) => {
                pass = false;
                parts.push(e);
                continue;
            }
        };
        let run = &suite.runs[idx];
        let front = run.trajectory.final_front();
        let h0 = run.spec.h0;
        let right = front.h - h0;
        let left = -front.g - h0;
        let t0 = match run.outcome.certificate {
            Certificate::Spreading { t0, .. } if t0.is_finite() => Some(t0),
            _ => None,
        };
        let leading_ok = if alpha > 0.0 { right > left } else { left > right };
        let ok = run.outcome.verdict == Verdict::Spreading && t0.is_some() && leading_ok;
        pass &= ok;
        parts.push(format!(
            "alpha={alpha:+}: {} t0={} advance left={left:.4} right={right:.4}",
            run.outcome.verdict,
            t0.map_or("none".into(), |t| format!("{t}"))
        ));
    }
    let v = check(pass, parts.join(", "));
    suite.report(3, "spreading example", started, Some(Duration::from_secs(120)), v);
}

fn criterion_4(suite: &mut Suite) {
    let started = Instant::now();
    let t_end = 40.0;
    let settings = default_settings();
    let mut pass = true;
    let mut parts = Vec::new();
    for alpha in [1.5, -1.5] {
        let spec = ModelSpec::reference(1.0, alpha);
        match suite.simulate(format!("reference mu=1 alpha={alpha:+}"), spec, &settings, t_end) {
            Ok(idx) => {
                let run = &suite.runs[idx];
                let ok = run.outcome.verdict == Verdict::Vanishing;
                pass &= ok;
                let detail = match &run.outcome.certificate {
                    Certificate::Vanishing {
                        max_sup,
                        mass_tolerance,
                        left_advance,
                        right_advance,
                        ..
                    } => format!(
                        "sup I={max_sup:.2e} (< {mass_tolerance:.1e}), advance {left_advance:.1e}/{right_advance:.1e}"
                    ),
                    Certificate::None { reason } => reason.clone(),
                    other => format!("{other:?}"),
                };
                parts.push(format!("alpha={alpha:+}: {} {detail}", run.outcome.verdict));
            }
            Err(e) => {
                pass = false;
                parts.push(e);
            }
        }
    }
    let v = check(pass, format!("t_end={t_end}: {}", parts.join(", ")));
    suite.report(4, "vanishing example", started, Some(Duration::from_secs(120)), v);
}

fn constant_run(suite: &mut Suite) -> Result<usize, String> {
    if let Some(idx) = suite.constant_run {
        return Ok(idx);
    }
    let settings = ProbeSettings {
        numerics: Numerics {
            dt: 1e-3,
            n: 2000,
            output_stride: 1000,
            ..Numerics::default()
        },
        // R0^F every 0.1 time units
        r0_stride: 100,
        ..ProbeSettings::default()
    };
    let idx = suite.simulate(
        String::from("constant mu=6 alpha=+1.5"),
        constant_spec(1.5, 6.0),
        &settings,
        40.0,
    )?;
    suite.constant_run = Some(idx);
    Ok(idx)
}

fn criterion_5(suite: &mut Suite) {
    let started = Instant::now();
    let v = match speed_match(suite) {
        Ok(v) => v,
        Err(e) => check(false, e),
    };
    suite.report(5, "spreading speed", started, Some(Duration::from_secs(600)), v);
}

fn speed_match(suite: &mut Suite) -> Result<Check, String> {
    let idx = constant_run(suite)?;
    let run = &suite.runs[idx];
    let cfg = SemiWaveConfig::default();
    let k_r = semiwave::speed(Direction::Rightward, &run.spec, &cfg)
        .map_err(|e| e.to_string())?
        .k_star;
    let k_l = semiwave::speed(Direction::Leftward, &run.spec, &cfg)
        .map_err(|e| e.to_string())?
        .k_star;
    let k0 = semiwave::speed(Direction::Rightward, &run.spec.with_alpha(0.0), &cfg)
        .map_err(|e| e.to_string())?
        .k_star;
    let fit = dynamics::estimate_speeds(&run.trajectory, dynamics::X_FAR).map_err(|e| e.to_string())?;
    let err_r = (fit.right.slope - k_r).abs() / k_r;
    let err_l = (fit.left.slope - k_l).abs() / k_l;
    let ordered = k_l < k0 && k0 < k_r;
    let pass = run.outcome.verdict == Verdict::Spreading && err_r <= SPEED_REL_TOL && err_l <= SPEED_REL_TOL && ordered;
    Ok(check(
        pass,
        format!(
            "right {:.4} vs k_r={k_r:.4} ({:.2}%), left {:.4} vs k_l={k_l:.4} ({:.2}%), k_l<k0={k0:.4}<k_r: {ordered}",
            fit.right.slope,
            100.0 * err_r,
            fit.left.slope,
            100.0 * err_l
        ),
    ))
}

/// Smooth, decaying perturbation of the reference coefficients that keeps
/// the far-field limits and positivity.
fn perturbed_spec(rng: &mut StdRng) -> (ModelSpec, f64, f64) {
    let pb: f64 = rng.random_range(-0.5..0.5);
    let wb: f64 = rng.random_range(0.5..2.0);
    let sb: f64 = rng.random_range(0.0..2.0 * PI);
    let pg: f64 = rng.random_range(-0.3..0.3);
    let wg: f64 = rng.random_range(0.5..2.0);
    let sg: f64 = rng.random_range(0.0..2.0 * PI);
    let alpha: f64 = rng.random_range(-1.5..1.5);
    let mu1: f64 = rng.random_range(0.5..3.0);
    let mu2: f64 = mu1 + rng.random_range(0.5..4.0);
    let beta = format!("4 + 2*sin(x)/(1 + x^2) + {pb:?}*sin({wb:?}*x + {sb:?})/(1 + x^2)");
    let gamma = format!("1 + cos(x)/(1 + x^2) + {pg:?}*cos({wg:?}*x + {sg:?})/(1 + x^2)");
    let spec = ModelSpec::from_exprs(4.0, alpha, mu1, 2.0, 1.0, &beta, &gamma, 4.0, 1.0, "cos(pi*x/2)")
        .expect("generated expressions parse");
    (spec, mu1, mu2)
}

/// Largest violation of the comparison ordering between a run with smaller
/// `mu` (`lo`) and one with larger `mu` (`hi`) over matched snapshot times.
fn ordering_violation(lo: &Trajectory, hi: &Trajectory) -> Result<(f64, usize), String> {
    let mut worst = 0.0f64;
    let mut matched = 0;
    for a in &lo.snapshots {
        let Some(b) = hi.snapshots.iter().find(|b| b.front.t == a.front.t) else {
            continue;
        };
        matched += 1;
        worst = worst.max(b.front.g - a.front.g).max(a.front.h - b.front.h);
        for (x, v) in a.profile() {
            worst = worst.max(v - b.value_at(x));
        }
    }
    if matched == 0 {
        return Err(String::from("no matched output times"));
    }
    Ok((worst, matched))
}

fn criterion_6(suite: &mut Suite) {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed_0006);
    let settings = default_settings();
    let t_end = 10.0;
    let mut pass = true;
    let mut parts = Vec::new();
    for draw in 0..5 {
        let (spec, mu1, mu2) = perturbed_spec(&mut rng);
        let a = suite.simulate(format!("draw {draw} mu={mu1:.3}"), spec.with_mu(mu1), &settings, t_end);
        let b = suite.simulate(format!("draw {draw} mu={mu2:.3}"), spec.with_mu(mu2), &settings, t_end);
        match (a, b) {
            (Ok(a), Ok(b)) => match ordering_violation(&suite.runs[a].trajectory, &suite.runs[b].trajectory) {
                Ok((worst, matched)) => {
                    pass &= worst <= ORDER_SLACK;
                    parts.push(format!(
                        "#{draw} mu {mu1:.2}<{mu2:.2} ({}/{}): {matched} times, worst {worst:.1e}",
                        suite.runs[a].outcome.verdict, suite.runs[b].outcome.verdict
                    ));
                }
                Err(e) => {
                    pass = false;
                    parts.push(format!("#{draw}: {e}"));
                }
            },
            (Err(e), _) | (_, Err(e)) => {
                pass = false;
                parts.push(e);
            }
        }
    }
    let v = check(pass, format!("{} (slack {ORDER_SLACK:e})", parts.join(", ")));
    suite.report(6, "mu comparison", started, Some(Duration::from_secs(300)), v);
}

fn criterion_7(suite: &mut Suite) {
    let started = Instant::now();
    let mut spreading = 0;
    let mut failures = Vec::new();
    let mut flat = 0;
    for run in suite.runs.iter().filter(|r| r.outcome.verdict == Verdict::Spreading) {
        spreading += 1;
        for w in run.trajectory.r0f_history.windows(2) {
            let step = w[1].1 - w[0].1;
            if step < -MONOTONE_SLACK {
                failures.push(format!("{}: R0F {} -> {} at t={}", run.label, w[0].1, w[1].1, w[1].0));
                break;
            }
            if step <= 0.0 {
                flat += 1;
            }
        }
    }
    let pass = spreading > 0 && failures.is_empty();
    let detail = if failures.is_empty() {
        format!("{spreading} spreading runs increasing, {flat} non-strict steps within {MONOTONE_SLACK:e}")
    } else {
        failures.join("; ")
    };
    suite.report(7, "R0F monotone", started, None, check(pass, detail));
}

fn criterion_8(suite: &mut Suite) {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut steps = 0;
    for run in &suite.runs {
        let d = &run.trajectory.diagnostics;
        if d.min_value < -BOUND_TOL || d.max_value > run.spec.n_star + BOUND_TOL {
            failures.push(format!("{}: I in [{:e}, {}]", run.label, d.min_value, d.max_value));
        }
        for w in run.trajectory.front_history.windows(2) {
            steps += 1;
            if !(w[1].g < w[0].g && w[1].h > w[0].h) {
                failures.push(format!(
                    "{}: fronts ({}, {}) -> ({}, {}) at t={}",
                    run.label, w[0].g, w[0].h, w[1].g, w[1].h, w[1].t
                ));
                break;
            }
        }
    }
    let pass = !suite.runs.is_empty() && failures.is_empty();
    let detail = if failures.is_empty() {
        format!("{} runs, {steps} accepted steps", suite.runs.len())
    } else {
        failures.join("; ")
    };
    suite.report(8, "maximum principle and fronts", started, None, check(pass, detail));
}

fn criterion_9(suite: &mut Suite) {
    let started = Instant::now();
    let spec = ModelSpec::reference(6.0, 1.5);
    let settings = ThresholdSettings::default();
    let executor = ThreadedExecutor::new(0);
    let v = match find_mu_star(&spec, (1.0, 6.0), &settings, &executor) {
        Ok(res) => {
            let (lo, hi) = res.interval;
            // classify the returned ends afresh
            let ends = (probe_mu(&spec, lo, &settings), probe_mu(&spec, hi, &settings));
            match ends {
                (Ok(a), Ok(b)) => {
                    let pass = hi - lo <= THRESHOLD_WIDTH
                        && a.verdict == Verdict::Vanishing
                        && b.verdict == Verdict::Spreading;
                    check(
                        pass,
                        format!(
                            "mu* in [{lo:.4}, {hi:.4}] (width {:.4}), ends {}/{}, {} probes",
                            hi - lo,
                            a.verdict,
                            b.verdict,
                            res.probes.len()
                        ),
                    )
                }
                (Err(e), _) | (_, Err(e)) => check(false, format!("re-classifying ends: {e}")),
            }
        }
        Err(e) => check(false, e.to_string()),
    };
    suite.report(9, "threshold enclosure", started, Some(Duration::from_secs(1800)), v);
}

fn criterion_10(suite: &mut Suite) {
    let started = Instant::now();
    let v = match constant_run(suite) {
        Ok(idx) => {
            let run = &suite.runs[idx];
            let target = run.spec.bulk_rates().map(|r| r.carrying()).unwrap_or(f64::NAN);
            let last = run.trajectory.last_snapshot();
            let worst = (0..=400)
                .map(|i| -5.0 + 10.0 * i as f64 / 400.0)
                .map(|x| (last.value_at(x) - target).abs())
                .fold(0.0f64, f64::max);
            let pass = last.front.t == 40.0 && worst < ATTRACTOR_TOL;
            check(
                pass,
                format!(
                    "max |I - {target}| on [-5, 5] at t={} is {worst:.2e} (tol {ATTRACTOR_TOL:e})",
                    last.front.t
                ),
            )
        }
        Err(e) => check(false, e),
    };
    suite.report(10, "equilibrium attraction", started, Some(Duration::from_secs(300)), v);
}

fn main() -> ExitCode {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let want = |n: u32| selected.is_empty() || selected.contains(&n);
    let mut suite = Suite::default();
    let criteria: [(u32, Criterion); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (10, criterion_10),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    for (n, f) in criteria {
        if want(n) {
            f(&mut suite);
        }
    }
    if suite.failures == 0 {
        println!("acceptance: all selected criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} criteria failed", suite.failures);
        ExitCode::FAILURE
    }
}
