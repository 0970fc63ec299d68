//! Semi-wave profiles and the asymptotic front speeds they select.
//!
//! A semi-wave with effective speed `c` solves
//! `d q'' - c q' + q (a - b q) = 0` on `z > 0` with `q(0) = 0`, `q(inf) = a/b`.
//! It is found by shooting backward in `z` from the saddle `(a/b, 0)` of the
//! phase plane `q' = p`, `p' = (c p - q (a - b q)) / d` until `q` reaches 0.
//! The front speed `k` then solves `mu q'(0) = k` with `c = k -+ alpha`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;

use crate::error::SemiWaveError;
use crate::model::ModelSpec;
use crate::ode::{Dopri5, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Rightward,
    Leftward,
}

impl Direction {
    /// Effective speed `k - alpha` (rightward) or `k + alpha` (leftward).
    pub fn effective_speed(self, k: f64, alpha: f64) -> f64 {
        match self {
            Direction::Rightward => k - alpha,
            Direction::Leftward => k + alpha,
        }
    }

    /// Supremum of admissible front speeds, `2 sqrt(a d) +- alpha`.
    pub fn speed_limit(self, c_min: f64, alpha: f64) -> f64 {
        match self {
            Direction::Rightward => c_min + alpha,
            Direction::Leftward => c_min - alpha,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Rightward => "rightward",
            Direction::Leftward => "leftward",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Shooting and root-finding controls.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiWaveConfig {
    /// Offset from the saddle along the stable direction, relative to `a/b`.
    pub epsilon: f64,
    pub rtol: f64,
    /// Absolute tolerance, relative to `a/b`.
    pub atol: f64,
    pub max_steps: usize,
    /// Relative width at which the speed bisection stops.
    pub root_rtol: f64,
    /// Distance of the bracket ends from `0` and from the speed limit.
    pub bracket_margin: f64,
    /// Uniform samples of the matching residual used to locate its root.
    pub scan_points: usize,
}

impl Default for SemiWaveConfig {
    fn default() -> Self {
        SemiWaveConfig {
            epsilon: 1e-8,
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 1_000_000,
            root_rtol: 1e-9,
            bracket_margin: 1e-6,
            scan_points: 64,
        }
    }
}

/// A semi-wave traced from the saddle down to `q = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiWaveProfile {
    /// `q'(0)`.
    pub slope0: f64,
    /// `(z, q(z))`, increasing in `z`, starting at `(0, 0)`.
    pub samples: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemiWaveResult {
    pub direction: Direction,
    pub k_star: f64,
    pub c_eff: f64,
    pub slope0: f64,
    pub profile: Vec<(f64, f64)>,
    /// Sign changes of `mu q'(0) - k` seen on the uniform scan.
    pub sign_changes: usize,
}

fn check_parameters(a: f64, b: f64, d: f64, c: f64) -> Result<f64, SemiWaveError> {
    if !(a > 0.0 && b > 0.0 && d > 0.0) || !(a.is_finite() && b.is_finite() && d.is_finite()) {
        return Err(SemiWaveError::Parameters(format!(
            "a, b and d_I must be positive and finite, got a = {a}, b = {b}, d_I = {d}"
        )));
    }
    if !c.is_finite() {
        return Err(SemiWaveError::Parameters(format!("effective speed {c} is not finite")));
    }
    let c_min = 2.0 * (a * d).sqrt();
    if c >= c_min {
        return Err(SemiWaveError::NoSemiWave { c_eff: c, c_min });
    }
    Ok(c_min)
}

/// Below this magnitude the phase-plane state counts as underflowed.
const UNDERFLOW: f64 = 1e-280;

fn shoot(
    c: f64,
    a: f64,
    b: f64,
    d: f64,
    config: &SemiWaveConfig,
    record: bool,
) -> Result<SemiWaveProfile, SemiWaveError> {
    check_parameters(a, b, d, c)?;
    let q_star = a / b;
    let r_stable = (c - (c * c + 4.0 * a * d).sqrt()) / (2.0 * d);
    let offset = config.epsilon * q_star;
    let rhs = move |y: &[f64; 2]| [y[1], (c * y[1] - y[0] * (a - b * y[0])) / d];
    let tol = Tolerances {
        rtol: config.rtol,
        atol: config.atol * q_star,
    };
    let mut solver = Dopri5::new(rhs, tol);
    let length = (d / a).sqrt();
    solver.h_max = length;

    let mut y = [q_star - offset, -offset * r_stable];
    let mut z = 0.0;
    let mut h = -0.01 * length;
    let mut trace: Vec<(f64, f64)> = Vec::new();
    if record {
        trace.push((z, y[0]));
    }
    for _ in 0..config.max_steps {
        let (next, used, h_next) = solver
            .adaptive_step(&y, h)
            .ok_or_else(|| SemiWaveError::Integration(format!("step size underflow at z = {z}")))?;
        if next[0] <= 0.0 {
            let (s, state) = locate_crossing(&mut solver, &y, used);
            let slope0 = state[1];
            let z_cross = z + s;
            let mut samples = Vec::with_capacity(trace.len() + 1);
            samples.push((0.0, 0.0));
            if record {
                samples.extend(trace.iter().rev().map(|&(zz, q)| (zz - z_cross, q)));
            }
            return Ok(SemiWaveProfile { slope0, samples });
        }
        if next[0].abs().max(next[1].abs()) < UNDERFLOW {
            return Err(SemiWaveError::Underflow { c_eff: c });
        }
        y = next;
        z += used;
        h = h_next;
        if record {
            trace.push((z, y[0]));
        }
    }
    Err(SemiWaveError::Integration(format!(
        "q did not reach 0 within {} steps",
        config.max_steps
    )))
}

/// Finds the partial step `s` (same sign as `h`) with `q(s) = 0`, using the
/// step's own Runge-Kutta map as the interpolant.
fn locate_crossing<F: FnMut(&[f64; 2]) -> [f64; 2]>(
    solver: &mut Dopri5<F, 2>,
    y: &[f64; 2],
    h: f64,
) -> (f64, [f64; 2]) {
    let (mut lo, mut q_lo) = (0.0, y[0]);
    let end = solver.trial(y, h).y;
    let (mut hi, mut q_hi) = (h, end[0]);
    let mut best = (hi, end);
    let mut side = 0i32;
    for _ in 0..200 {
        // Illinois variant of regula falsi
        let s = (lo * q_hi - hi * q_lo) / (q_hi - q_lo);
        let s = if s.is_finite() && (s - lo) * (s - hi) < 0.0 {
            s
        } else {
            0.5 * (lo + hi)
        };
        let state = solver.trial(y, s).y;
        best = (s, state);
        let q = state[0];
        if q == 0.0 || (hi - lo).abs() <= 4.0 * f64::EPSILON * h.abs() {
            break;
        }
        if q > 0.0 {
            lo = s;
            q_lo = q;
            if side == 1 {
                q_hi *= 0.5;
            }
            side = 1;
        } else {
            hi = s;
            q_hi = q;
            if side == -1 {
                q_lo *= 0.5;
            }
            side = -1;
        }
    }
    best
}

/// `q'(0)` of the semi-wave with effective speed `c_eff`.
pub fn semiwave_slope(c_eff: f64, a: f64, b: f64, d: f64, config: &SemiWaveConfig) -> Result<f64, SemiWaveError> {
    shoot(c_eff, a, b, d, config, false).map(|p| p.slope0)
}

/// Full profile of the semi-wave with effective speed `c_eff`.
pub fn semiwave_profile(
    c_eff: f64,
    a: f64,
    b: f64,
    d: f64,
    config: &SemiWaveConfig,
) -> Result<SemiWaveProfile, SemiWaveError> {
    shoot(c_eff, a, b, d, config, true)
}

/// Parameters of a speed problem, decoupled from a full [`ModelSpec`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedProblem {
    pub mu: f64,
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
    pub d: f64,
}

impl SpeedProblem {
    pub fn from_spec(spec: &ModelSpec) -> Result<Self, SemiWaveError> {
        let rates = spec.bulk_rates()?;
        Ok(SpeedProblem {
            mu: spec.mu,
            alpha: spec.alpha,
            a: rates.a,
            b: rates.b,
            d: spec.d_i,
        })
    }

    fn residual(&self, direction: Direction, k: f64, config: &SemiWaveConfig) -> Result<f64, SemiWaveError> {
        let c = direction.effective_speed(k, self.alpha);
        match semiwave_slope(c, self.a, self.b, self.d, config) {
            Ok(slope) => Ok(self.mu * slope - k),
            // the profile decays below f64 range: slope is 0+
            Err(SemiWaveError::Underflow { .. }) => Ok(-k),
            Err(e) => Err(e),
        }
    }

    /// Unique `k` in `(0, 2 sqrt(a d) +- alpha)` with `mu q'(0) = k`.
    pub fn solve(&self, direction: Direction, config: &SemiWaveConfig) -> Result<SemiWaveResult, SemiWaveError> {
        if !(self.mu > 0.0) || !self.mu.is_finite() || !self.alpha.is_finite() {
            return Err(SemiWaveError::Parameters(format!(
                "mu must be positive and alpha finite, got mu = {}, alpha = {}",
                self.mu, self.alpha
            )));
        }
        let c_min = check_parameters(self.a, self.b, self.d, 0.0)?;
        let lo = config.bracket_margin;
        let hi = direction.speed_limit(c_min, self.alpha) - config.bracket_margin;
        if !(hi > lo) {
            return Err(SemiWaveError::Parameters(format!(
                "advection {} is not small: empty speed range for {direction} fronts",
                self.alpha
            )));
        }
        let points = config.scan_points.max(2);
        let mut samples = Vec::with_capacity(points);
        for i in 0..points {
            let k = lo + (hi - lo) * i as f64 / (points - 1) as f64;
            samples.push((k, self.residual(direction, k, config)?));
        }
        let sign_changes = samples.windows(2).filter(|w| (w[0].1 > 0.0) != (w[1].1 > 0.0)).count();
        let first = samples.windows(2).position(|w| w[0].1 > 0.0 && w[1].1 <= 0.0);
        let Some(i) = first else {
            return Err(SemiWaveError::Bracket { samples });
        };
        let (mut a_k, mut b_k) = (samples[i].0, samples[i + 1].0);
        while b_k - a_k > config.root_rtol * 0.5 * (a_k + b_k) {
            let m = 0.5 * (a_k + b_k);
            if self.residual(direction, m, config)? > 0.0 {
                a_k = m;
            } else {
                b_k = m;
            }
        }
        let k_star = 0.5 * (a_k + b_k);
        let c_eff = direction.effective_speed(k_star, self.alpha);
        let profile = semiwave_profile(c_eff, self.a, self.b, self.d, config)?;
        Ok(SemiWaveResult {
            direction,
            k_star,
            c_eff,
            slope0: profile.slope0,
            profile: profile.samples,
            sign_changes,
        })
    }
}

/// Asymptotic speed of the right (`Rightward`) or left (`Leftward`) front.
pub fn speed(direction: Direction, spec: &ModelSpec, config: &SemiWaveConfig) -> Result<SemiWaveResult, SemiWaveError> {
    let violations = spec.validate()?;
    if !violations.is_empty() {
        let text: Vec<String> = violations.iter().map(|v| format!("{v}")).collect();
        return Err(SemiWaveError::Parameters(text.join("; ")));
    }
    SpeedProblem::from_spec(spec)?.solve(direction, config)
}
