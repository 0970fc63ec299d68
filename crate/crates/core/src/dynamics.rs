//! Spreading/vanishing classification, the threshold in `mu`, front-speed
//! fits and convergence to the endemic equilibrium.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;

use crate::error::{AnalysisError, SolverError};
use crate::frontfix::{self, Control, Numerics, Observer, Snapshot, Trajectory};
use crate::model::{FrontState, ModelSpec};
use crate::spectral::{r0_dirichlet_advection, SpectralConfig};
use crate::steady::EquilibriumProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Spreading,
    Vanishing,
    Undetermined,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Spreading => "spreading",
            Verdict::Vanishing => "vanishing",
            Verdict::Undetermined => "undetermined",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Evidence behind a verdict.
#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    /// `R0^F(t0) >= 1` on the interval occupied at `t0`.
    Spreading {
        t0: f64,
        r0: f64,
        interval: (f64, f64),
    },
    /// All three clauses over the trailing window starting at `window_start`.
    Vanishing {
        window_start: f64,
        left_advance: f64,
        right_advance: f64,
        front_tolerance: f64,
        max_sup: f64,
        mass_tolerance: f64,
        terminal_r0: f64,
    },
    None {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDiagnostics {
    pub final_sup: f64,
    pub final_front: FrontState,
    /// Last simulated time.
    pub horizon: f64,
    pub max_r0f: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub verdict: Verdict,
    pub certificate: Certificate,
    pub diagnostics: OutcomeDiagnostics,
}

/// Thresholds of the vanishing test. Front and mass tolerances are relative
/// to `h - g` and `N*`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyCriteria {
    pub trailing_fraction: f64,
    pub front_tolerance: f64,
    pub mass_tolerance: f64,
    /// Vanishing is never concluded on a shorter run.
    pub min_horizon: f64,
}

impl Default for ClassifyCriteria {
    fn default() -> Self {
        ClassifyCriteria {
            trailing_fraction: 0.2,
            front_tolerance: 1e-6,
            mass_tolerance: 1e-5,
            min_horizon: 0.0,
        }
    }
}

/// Observer that samples `R0^F(t)` every `stride` nominal steps.
pub struct R0Monitor<'a> {
    spec: &'a ModelSpec,
    config: &'a SpectralConfig,
    stride: usize,
    stop_on_certificate: bool,
}

impl<'a> R0Monitor<'a> {
    pub fn new(spec: &'a ModelSpec, config: &'a SpectralConfig, stride: usize, stop_on_certificate: bool) -> Self {
        R0Monitor {
            spec,
            config,
            stride: stride.max(1),
            stop_on_certificate,
        }
    }
}

impl Observer for R0Monitor<'_> {
    fn observe(
        &mut self,
        step: usize,
        snapshot: &Snapshot,
        trajectory: &mut Trajectory,
    ) -> Result<Control, SolverError> {
        if !step.is_multiple_of(self.stride) {
            return Ok(Control::Continue);
        }
        let front = snapshot.front;
        let r0 = r0_dirichlet_advection((front.g, front.h), self.spec, self.config)?.r0;
        trajectory.r0f_history.push((front.t, r0));
        if self.stop_on_certificate && r0 >= 1.0 {
            Ok(Control::Stop)
        } else {
            Ok(Control::Continue)
        }
    }
}

fn undetermined(reason: String, diagnostics: OutcomeDiagnostics) -> Outcome {
    Outcome {
        verdict: Verdict::Undetermined,
        certificate: Certificate::None { reason },
        diagnostics,
    }
}

/// Classifies a run. Spreading needs a sampled `R0^F(t) >= 1`; vanishing
/// needs stalled fronts, negligible mass and `R0 < 1` on the final interval
/// over the trailing window. Anything else is undetermined.
pub fn classify(
    trajectory: &Trajectory,
    spec: &ModelSpec,
    criteria: &ClassifyCriteria,
    spectral: &SpectralConfig,
) -> Outcome {
    let last = trajectory.front_history.last();
    let Some(last) = last else {
        let diagnostics = OutcomeDiagnostics {
            final_sup: f64::NAN,
            final_front: FrontState {
                t: 0.0,
                g: -spec.h0,
                h: spec.h0,
            },
            horizon: 0.0,
            max_r0f: None,
        };
        return undetermined(String::from("empty trajectory"), diagnostics);
    };
    let final_front = FrontState {
        t: last.t,
        g: last.g,
        h: last.h,
    };
    let horizon = last.t;

    let mut series = trajectory.r0f_history.clone();
    let mut series_error = None;
    if series.is_empty() {
        for snap in &trajectory.snapshots {
            match r0_dirichlet_advection((snap.front.g, snap.front.h), spec, spectral) {
                Ok(r) => series.push((snap.front.t, r.r0)),
                Err(e) => {
                    series_error = Some(e);
                    break;
                }
            }
        }
    }
    let max_r0f = series
        .iter()
        .map(|s| s.1)
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));
    let diagnostics = OutcomeDiagnostics {
        final_sup: last.sup_i,
        final_front,
        horizon,
        max_r0f,
    };

    if let Some(&(t0, r0)) = series.iter().find(|s| s.1 >= 1.0) {
        let interval = trajectory
            .front_history
            .iter()
            .find(|r| r.t >= t0)
            .map_or((final_front.g, final_front.h), |r| (r.g, r.h));
        return Outcome {
            verdict: Verdict::Spreading,
            certificate: Certificate::Spreading { t0, r0, interval },
            diagnostics,
        };
    }
    if let Some(e) = series_error {
        return undetermined(format!("R0 series unavailable: {e}"), diagnostics);
    }
    if horizon < criteria.min_horizon || horizon <= 0.0 {
        return undetermined(
            format!(
                "horizon {horizon} is below the minimum {}; extend t_end",
                criteria.min_horizon
            ),
            diagnostics,
        );
    }

    let window_start = horizon * (1.0 - criteria.trailing_fraction);
    let Some(first) = trajectory.front_history.iter().find(|r| r.t >= window_start) else {
        return undetermined(String::from("no samples in the trailing window"), diagnostics);
    };
    let left_advance = first.g - last.g;
    let right_advance = last.h - first.h;
    let front_tolerance = criteria.front_tolerance * final_front.width();
    let max_sup = trajectory
        .front_history
        .iter()
        .filter(|r| r.t >= window_start)
        .fold(0.0f64, |m, r| m.max(r.sup_i));
    let mass_tolerance = criteria.mass_tolerance * spec.n_star;
    let terminal_r0 = match r0_dirichlet_advection((final_front.g, final_front.h), spec, spectral) {
        Ok(r) => r.r0,
        Err(e) => return undetermined(format!("terminal R0 unavailable: {e}"), diagnostics),
    };
    let stalled = left_advance < front_tolerance && right_advance < front_tolerance;
    let decayed = max_sup < mass_tolerance;
    let subcritical = terminal_r0 < 1.0;
    if stalled && decayed && subcritical {
        return Outcome {
            verdict: Verdict::Vanishing,
            certificate: Certificate::Vanishing {
                window_start: first.t,
                left_advance,
                right_advance,
                front_tolerance,
                max_sup,
                mass_tolerance,
                terminal_r0,
            },
            diagnostics,
        };
    }
    let mut reasons = Vec::new();
    if !stalled {
        reasons.push(format!(
            "fronts still moving (advance {left_advance:e}/{right_advance:e} vs {front_tolerance:e})"
        ));
    }
    if !decayed {
        reasons.push(format!("sup I = {max_sup:e} above {mass_tolerance:e}"));
    }
    if !subcritical {
        reasons.push(format!("terminal R0 = {terminal_r0} >= 1"));
    }
    undetermined(format!("{}; extend t_end", reasons.join(", ")), diagnostics)
}

/// Settings for a simulation followed by classification.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSettings {
    pub numerics: Numerics,
    pub criteria: ClassifyCriteria,
    pub spectral: SpectralConfig,
    /// `R0^F` is sampled every this many nominal steps.
    pub r0_stride: usize,
}

impl Default for ProbeSettings {
    fn default() -> Self {
        ProbeSettings {
            numerics: Numerics::default(),
            criteria: ClassifyCriteria::default(),
            spectral: SpectralConfig::default(),
            r0_stride: 10,
        }
    }
}

/// Runs to `t_end` while sampling `R0^F` and classifies the result. With
/// `stop_on_certificate` the run ends at the first sample with `R0^F >= 1`.
pub fn simulate_and_classify(
    spec: &ModelSpec,
    settings: &ProbeSettings,
    t_end: f64,
    stop_on_certificate: bool,
) -> Result<(Trajectory, Outcome), AnalysisError> {
    let mut monitor = R0Monitor::new(spec, &settings.spectral, settings.r0_stride, stop_on_certificate);
    let trajectory = frontfix::run(spec, &settings.numerics, t_end, &mut monitor)?;
    let outcome = classify(&trajectory, spec, &settings.criteria, &settings.spectral);
    Ok((trajectory, outcome))
}

/// One classified probe of the threshold search.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRecord {
    pub mu: f64,
    pub verdict: Verdict,
    pub t0: Option<f64>,
    /// Horizon of the run that produced the verdict.
    pub horizon: f64,
}

pub type ProbeFn<'a> = dyn Fn(f64) -> Result<ProbeRecord, AnalysisError> + Sync + 'a;

/// Runs a batch of independent probes. Results come back in input order.
pub trait ProbeExecutor {
    fn workers(&self) -> usize;
    fn execute(&self, mus: &[f64], probe: &ProbeFn<'_>) -> Vec<Result<ProbeRecord, AnalysisError>>;
}

/// Runs probes one after another.
#[derive(Debug, Clone, Copy, Default)]
pub struct SequentialExecutor;

impl ProbeExecutor for SequentialExecutor {
    fn workers(&self) -> usize {
        1
    }

    fn execute(&self, mus: &[f64], probe: &ProbeFn<'_>) -> Vec<Result<ProbeRecord, AnalysisError>> {
        mus.iter().map(|&mu| probe(mu)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSettings {
    pub probe: ProbeSettings,
    /// Requested width of the enclosing interval.
    pub width: f64,
    /// Initial horizon of every probe; doubled on undetermined verdicts.
    pub horizon: f64,
    pub max_horizon: f64,
}

impl Default for ThresholdSettings {
    fn default() -> Self {
        ThresholdSettings {
            probe: ProbeSettings::default(),
            width: 0.25,
            horizon: 20.0,
            max_horizon: 160.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdResult {
    /// Midpoint of `interval`.
    pub mu_star: f64,
    /// `[mu_lo, mu_hi]` with vanishing at `mu_lo` and spreading at `mu_hi`.
    pub interval: (f64, f64),
    /// Every probe in the order it was issued.
    pub probes: Vec<ProbeRecord>,
    /// True when `R0^F(0) >= 1`, so every `mu > 0` spreads.
    pub spreads_for_all_mu: bool,
}

/// Classifies one `mu`, doubling the horizon while undetermined.
pub fn probe_mu(spec: &ModelSpec, mu: f64, settings: &ThresholdSettings) -> Result<ProbeRecord, AnalysisError> {
    let spec = spec.with_mu(mu);
    let mut horizon = settings.horizon;
    loop {
        let (_, outcome) = simulate_and_classify(&spec, &settings.probe, horizon, true)?;
        let t0 = match outcome.certificate {
            Certificate::Spreading { t0, .. } => Some(t0),
            _ => None,
        };
        if outcome.verdict != Verdict::Undetermined {
            return Ok(ProbeRecord {
                mu,
                verdict: outcome.verdict,
                t0,
                horizon,
            });
        }
        if 2.0 * horizon > settings.max_horizon {
            return Err(AnalysisError::InconclusiveProbe { mu, horizon });
        }
        horizon *= 2.0;
    }
}

/// Encloses the sharp threshold `mu*` by repeated `k`-section of `bracket`,
/// with `k - 1` concurrent probes per round (`k - 1` = executor workers).
pub fn find_mu_star(
    spec: &ModelSpec,
    bracket: (f64, f64),
    settings: &ThresholdSettings,
    executor: &dyn ProbeExecutor,
) -> Result<ThresholdResult, AnalysisError> {
    let (lo, hi) = bracket;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(AnalysisError::Bracket(format!("need 0 < lo < hi, got [{lo}, {hi}]")));
    }
    if !(settings.width > 0.0) || !(settings.horizon > 0.0) {
        return Err(AnalysisError::Precondition(String::from(
            "width and horizon must be positive",
        )));
    }
    let violations = spec.validate().map_err(SolverError::from)?;
    if !violations.is_empty() {
        let text: Vec<String> = violations.iter().map(|v| format!("{v}")).collect();
        return Err(AnalysisError::Precondition(text.join("; ")));
    }
    let r0_initial = r0_dirichlet_advection((-spec.h0, spec.h0), spec, &settings.probe.spectral)?.r0;
    if r0_initial >= 1.0 {
        return Ok(ThresholdResult {
            mu_star: 0.0,
            interval: (0.0, 0.0),
            probes: Vec::new(),
            spreads_for_all_mu: true,
        });
    }

    let probe = |mu: f64| probe_mu(spec, mu, settings);
    let mut probes = Vec::new();
    let ends = executor.execute(&[lo, hi], &probe);
    let mut ends = ends.into_iter();
    let low = ends.next().expect("two results")?;
    let high = ends.next().expect("two results")?;
    probes.push(low.clone());
    probes.push(high.clone());
    if low.verdict != Verdict::Vanishing || high.verdict != Verdict::Spreading {
        return Err(AnalysisError::Bracket(format!(
            "mu = {lo} gives {} and mu = {hi} gives {}; need vanishing then spreading",
            low.verdict, high.verdict
        )));
    }

    let (mut lo, mut hi) = (lo, hi);
    let k = executor.workers().max(1);
    while hi - lo > settings.width {
        let mus: Vec<f64> = (1..=k).map(|i| lo + (hi - lo) * i as f64 / (k + 1) as f64).collect();
        let results = executor.execute(&mus, &probe);
        let mut round = Vec::with_capacity(k);
        for r in results {
            round.push(r?);
        }
        let first_spread = round.iter().position(|r| r.verdict == Verdict::Spreading);
        if let Some(i) = first_spread {
            if let Some(bad) = round[i..].iter().find(|r| r.verdict != Verdict::Spreading) {
                return Err(AnalysisError::Bracket(format!(
                    "verdicts not monotone in mu: spreading at {} but {} at {}",
                    round[i].mu, bad.verdict, bad.mu
                )));
            }
        }
        let (new_lo, new_hi) = match first_spread {
            Some(0) => (lo, round[0].mu),
            Some(i) => (round[i - 1].mu, round[i].mu),
            None => (round[k - 1].mu, hi),
        };
        probes.extend(round);
        lo = new_lo;
        hi = new_hi;
    }
    Ok(ThresholdResult {
        mu_star: 0.5 * (lo + hi),
        interval: (lo, hi),
        probes,
        spreads_for_all_mu: false,
    })
}

/// Least-squares line through `(t, position)` samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub residual: f64,
    pub samples: usize,
}

fn fit_line(points: &[(f64, f64)]) -> Option<LineFit> {
    let n = points.len();
    if n < 3 {
        return None;
    }
    let nf = n as f64;
    let mt = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let (mut stt, mut sty) = (0.0, 0.0);
    for &(t, y) in points {
        stt += (t - mt) * (t - mt);
        sty += (t - mt) * (y - my);
    }
    if !(stt > 0.0) {
        return None;
    }
    let slope = sty / stt;
    let intercept = my - slope * mt;
    let ss = points
        .iter()
        .map(|&(t, y)| (y - intercept - slope * t).powi(2))
        .sum::<f64>();
    Some(LineFit {
        slope,
        intercept,
        residual: (ss / nf).sqrt(),
        samples: n,
    })
}

/// Fitted asymptotic speeds of the left front (`-g`) and the right front.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedEstimate {
    pub left: LineFit,
    pub right: LineFit,
}

/// Default distance beyond which the coefficients count as far field.
pub const X_FAR: f64 = 10.0;

/// Least-squares front speeds over the trailing half of the run.
pub fn estimate_speeds(trajectory: &Trajectory, x_far: f64) -> Result<SpeedEstimate, AnalysisError> {
    let last = trajectory
        .front_history
        .last()
        .ok_or_else(|| AnalysisError::InsufficientData(String::from("empty front history")))?;
    if !(last.h > x_far && -last.g > x_far) {
        return Err(AnalysisError::Precondition(format!(
            "fronts ({}, {}) have not passed |x| = {x_far}; extend t_end",
            last.g, last.h
        )));
    }
    let start = 0.5 * last.t;
    let tail: Vec<_> = trajectory.front_history.iter().filter(|r| r.t >= start).collect();
    let right: Vec<(f64, f64)> = tail.iter().map(|r| (r.t, r.h)).collect();
    let left: Vec<(f64, f64)> = tail.iter().map(|r| (r.t, -r.g)).collect();
    match (fit_line(&left), fit_line(&right)) {
        (Some(left), Some(right)) => Ok(SpeedEstimate { left, right }),
        _ => Err(AnalysisError::InsufficientData(format!(
            "{} front samples in the trailing half",
            tail.len()
        ))),
    }
}

/// Distance to the equilibrium on `[-m, m]` for the snapshots in the last
/// 10% of the run.
#[derive(Debug, Clone, PartialEq)]
pub struct AttractorReport {
    pub window: (f64, f64),
    /// `(t, max |I - I*|)` in time order.
    pub errors: Vec<(f64, f64)>,
    pub final_error: f64,
    pub max_error: f64,
}

/// Points per unit length used to sample the window.
const WINDOW_DENSITY: f64 = 40.0;

pub fn verify_attractor(
    trajectory: &Trajectory,
    outcome: &Outcome,
    equilibrium: &EquilibriumProfile,
    m: f64,
) -> Result<AttractorReport, AnalysisError> {
    if outcome.verdict != Verdict::Spreading {
        return Err(AnalysisError::Precondition(format!(
            "attraction to the equilibrium needs a spreading run, got {}",
            outcome.verdict
        )));
    }
    if !(m > 0.0) || m > equilibrium.l {
        return Err(AnalysisError::Precondition(format!(
            "window half-width {m} must lie in (0, {}]",
            equilibrium.l
        )));
    }
    let last = trajectory.last_snapshot();
    let start = 0.9 * last.front.t;
    let points = ((2.0 * m * WINDOW_DENSITY).ceil() as usize).max(2);
    let mut errors = Vec::new();
    for snap in trajectory.snapshots.iter().filter(|s| s.front.t >= start) {
        if !(snap.front.g < -m && snap.front.h > m) {
            return Err(AnalysisError::Window {
                lo: -m,
                hi: m,
                g: snap.front.g,
                h: snap.front.h,
            });
        }
        let mut worst = 0.0f64;
        for i in 0..=points {
            let x = -m + 2.0 * m * i as f64 / points as f64;
            let target = equilibrium.value_at(x).expect("window inside truncation");
            worst = worst.max((snap.value_at(x) - target).abs());
        }
        errors.push((snap.front.t, worst));
    }
    let final_error = errors.last().map_or(f64::NAN, |e| e.1);
    let max_error = errors.iter().fold(0.0f64, |acc, e| acc.max(e.1));
    Ok(AttractorReport {
        window: (-m, m),
        errors,
        final_error,
        max_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontfix::NoObserver;
    use crate::steady::solve_equilibrium;

    fn fast() -> ProbeSettings {
        ProbeSettings {
            numerics: Numerics {
                n: 100,
                dt: 2e-2,
                output_stride: 50,
                ..Numerics::default()
            },
            ..ProbeSettings::default()
        }
    }

    #[test]
    fn initial_certificate_stops_at_step_zero() {
        // wide initial interval with constant high-risk coefficients
        let spec = ModelSpec::constant(1.0, 0.0, 1.0, 2.0, 5.0, 4.0, 1.0);
        let (traj, outcome) = simulate_and_classify(&spec, &fast(), 10.0, true).unwrap();
        assert_eq!(outcome.verdict, Verdict::Spreading);
        match outcome.certificate {
            Certificate::Spreading { t0, r0, .. } => {
                assert_eq!(t0, 0.0);
                assert!(r0 >= 1.0);
            }
            other => panic!("{other:?}"),
        }
        assert!(traj.diagnostics.stopped_early);
        assert_eq!(traj.front_history.len(), 1);
        let result = find_mu_star(&spec, (1.0, 6.0), &ThresholdSettings::default(), &SequentialExecutor).unwrap();
        assert_eq!(result.mu_star, 0.0);
        assert!(result.spreads_for_all_mu);
    }

    #[test]
    fn small_mu_vanishes() {
        let spec = ModelSpec::reference(1.0, 1.5);
        let (_, outcome) = simulate_and_classify(&spec, &fast(), 30.0, false).unwrap();
        assert_eq!(outcome.verdict, Verdict::Vanishing, "{:?}", outcome.certificate);
        if let Certificate::Vanishing {
            terminal_r0,
            max_sup,
            mass_tolerance,
            ..
        } = outcome.certificate
        {
            assert!(terminal_r0 < 1.0 && max_sup < mass_tolerance);
        }
    }

    #[test]
    fn short_run_is_undetermined() {
        let spec = ModelSpec::reference(1.0, 1.5);
        let (_, outcome) = simulate_and_classify(&spec, &fast(), 0.5, false).unwrap();
        assert_eq!(outcome.verdict, Verdict::Undetermined);
    }

    #[test]
    fn spreading_certificate_is_reproducible() {
        let spec = ModelSpec::reference(6.0, 1.5);
        let settings = fast();
        let (_, outcome) = simulate_and_classify(&spec, &settings, 20.0, true).unwrap();
        let Certificate::Spreading { interval, .. } = outcome.certificate else {
            panic!("{:?}", outcome.certificate);
        };
        let r0 = r0_dirichlet_advection(interval, &spec, &settings.spectral).unwrap().r0;
        assert!(r0 >= 1.0 - 1e-8);
    }

    #[test]
    fn line_fit_recovers_slope() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 2.0 + 0.5 * i as f64)).collect();
        let fit = fit_line(&pts).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-14 && (fit.intercept - 2.0).abs() < 1e-13);
        assert!(fit.residual < 1e-13);
        assert!(fit_line(&pts[..2]).is_none());
    }

    #[test]
    fn symmetric_speeds_without_advection() {
        let spec = ModelSpec::constant(4.0, 0.0, 6.0, 2.0, 1.0, 4.0, 1.0);
        let numerics = Numerics {
            n: 400,
            dt: 1e-2,
            ..Numerics::default()
        };
        let traj = frontfix::run(&spec, &numerics, 8.0, &mut NoObserver).unwrap();
        let est = estimate_speeds(&traj, X_FAR).unwrap();
        assert!((est.left.slope - est.right.slope).abs() < 0.02 * est.right.slope);
    }

    #[test]
    fn attractor_refuses_vanishing_runs() {
        let spec = ModelSpec::reference(1.0, 1.5);
        let (traj, outcome) = simulate_and_classify(&spec, &fast(), 30.0, false).unwrap();
        let eq = solve_equilibrium(&spec, 20.0, 800).unwrap();
        assert!(matches!(
            verify_attractor(&traj, &outcome, &eq, 0.5),
            Err(AnalysisError::Precondition(_))
        ));
    }
}
