//! Endemic equilibrium on the truncated line `[-L, L]`.
//!
//! Solves `-d_I I'' + alpha I' = (beta - gamma) I - (beta / N*) I^2` with
//! Dirichlet data `I(+-L) = a/b` by Newton's method on centred differences.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;

use crate::error::SteadyError;
use crate::interp;
use crate::model::ModelSpec;
use crate::tridiag::thomas_solve;

/// Smallest admissible truncation half-length.
pub const MIN_HALF_LENGTH: f64 = 20.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyConfig {
    /// Sup-norm of the discrete residual at which Newton stops.
    pub tol: f64,
    pub max_iter: usize,
    /// Required agreement of the solutions started from `a/b` and `N*`.
    pub agreement: f64,
}

impl Default for SteadyConfig {
    fn default() -> Self {
        SteadyConfig {
            tol: 1e-10,
            max_iter: 100,
            agreement: 1e-7,
        }
    }
}

/// Equilibrium samples on a uniform grid including both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumProfile {
    pub l: f64,
    pub samples: Vec<(f64, f64)>,
    /// Final residual sup-norm.
    pub residual: f64,
    pub iterations: usize,
}

impl EquilibriumProfile {
    pub fn spacing(&self) -> f64 {
        2.0 * self.l / (self.samples.len() - 1) as f64
    }

    /// Cubic interpolation; `None` outside `[-L, L]`.
    pub fn value_at(&self, x: f64) -> Option<f64> {
        if !(x >= -self.l && x <= self.l) {
            return None;
        }
        let n = self.samples.len();
        Some(interp::uniform_cubic(
            |k| self.samples[k].1,
            n,
            -self.l,
            self.spacing(),
            x,
        ))
    }

    pub fn min(&self) -> f64 {
        self.samples.iter().fold(f64::INFINITY, |m, s| m.min(s.1))
    }

    pub fn max(&self) -> f64 {
        self.samples.iter().fold(f64::NEG_INFINITY, |m, s| m.max(s.1))
    }
}

struct Problem {
    d: f64,
    alpha: f64,
    spacing: f64,
    growth: Vec<f64>,
    crowding: Vec<f64>,
    boundary: f64,
}

impl Problem {
    /// Residual at interior nodes of a full vector (ends included).
    fn residual(&self, u: &[f64], out: &mut [f64]) -> f64 {
        let h2 = self.spacing * self.spacing;
        let mut norm = 0.0f64;
        for j in 1..u.len() - 1 {
            let r = -self.d * (u[j - 1] - 2.0 * u[j] + u[j + 1]) / h2
                + self.alpha * (u[j + 1] - u[j - 1]) / (2.0 * self.spacing)
                - self.growth[j] * u[j]
                + self.crowding[j] * u[j] * u[j];
            out[j - 1] = r;
            norm = norm.max(r.abs());
        }
        norm
    }

    fn newton(&self, mut u: Vec<f64>, config: &SteadyConfig) -> Result<(Vec<f64>, f64, usize), SteadyError> {
        let m = u.len() - 2;
        let h2 = self.spacing * self.spacing;
        let conv = self.alpha / (2.0 * self.spacing);
        let mut res = vec![0.0; m];
        let mut step = vec![0.0; m];
        let mut scratch = vec![0.0; m];
        let (mut lower, mut diag, mut upper) = (vec![0.0; m], vec![0.0; m], vec![0.0; m]);
        let mut trial = u.clone();
        let mut history = Vec::new();
        let mut norm = self.residual(&u, &mut res);
        history.push(norm);
        for iter in 0..config.max_iter {
            if norm < config.tol {
                return Ok((u, norm, iter));
            }
            for i in 0..m {
                let j = i + 1;
                lower[i] = -self.d / h2 - conv;
                upper[i] = -self.d / h2 + conv;
                diag[i] = 2.0 * self.d / h2 - self.growth[j] + 2.0 * self.crowding[j] * u[j];
                step[i] = -res[i];
            }
            if !thomas_solve(&lower, &diag, &upper, &mut step, &mut scratch) {
                return Err(SteadyError::Divergence { history });
            }
            let mut lambda = 1.0;
            let mut next_norm = f64::INFINITY;
            for _ in 0..30 {
                for i in 0..m {
                    trial[i + 1] = u[i + 1] + lambda * step[i];
                }
                next_norm = self.residual(&trial, &mut res);
                if next_norm.is_finite() && next_norm < (1.0 - 1e-4 * lambda) * norm {
                    break;
                }
                lambda *= 0.5;
            }
            if !next_norm.is_finite() || next_norm >= norm {
                history.push(next_norm);
                return Err(SteadyError::Divergence { history });
            }
            core::mem::swap(&mut u, &mut trial);
            trial.copy_from_slice(&u);
            norm = next_norm;
            history.push(norm);
        }
        if norm < config.tol {
            Ok((u, norm, config.max_iter))
        } else {
            Err(SteadyError::Divergence { history })
        }
    }
}

/// Endemic equilibrium on `[-l, l]` with `n` cells, using default tolerances.
pub fn solve_equilibrium(spec: &ModelSpec, l: f64, n: usize) -> Result<EquilibriumProfile, SteadyError> {
    solve_equilibrium_with(spec, l, n, &SteadyConfig::default())
}

pub fn solve_equilibrium_with(
    spec: &ModelSpec,
    l: f64,
    n: usize,
    config: &SteadyConfig,
) -> Result<EquilibriumProfile, SteadyError> {
    if !(l >= MIN_HALF_LENGTH) || !l.is_finite() {
        return Err(SteadyError::Precondition(format!(
            "truncation half-length must be at least {MIN_HALF_LENGTH}, got {l}"
        )));
    }
    if n < 4 {
        return Err(SteadyError::Precondition(format!("need at least 4 cells, got {n}")));
    }
    let rates = spec.bulk_rates()?;
    let spacing = 2.0 * l / n as f64;
    let xs: Vec<f64> = (0..=n).map(|j| -l + spacing * j as f64).collect();
    let mut growth = Vec::with_capacity(n + 1);
    let mut crowding = Vec::with_capacity(n + 1);
    for &x in &xs {
        let b = spec.beta_at(x);
        let g = spec.gamma_at(x);
        if !(b > 0.0 && g > 0.0) {
            return Err(SteadyError::Precondition(format!(
                "beta and gamma must be positive: beta({x}) = {b}, gamma({x}) = {g}"
            )));
        }
        growth.push(b - g);
        crowding.push(b / spec.n_star);
    }
    let problem = Problem {
        d: spec.d_i,
        alpha: spec.alpha,
        spacing,
        growth,
        crowding,
        boundary: rates.carrying(),
    };
    let start = |level: f64| {
        let mut u = vec![level; n + 1];
        u[0] = problem.boundary;
        u[n] = problem.boundary;
        u
    };
    let (low, residual, iterations) = problem.newton(start(problem.boundary), config)?;
    let (high, _, _) = problem.newton(start(spec.n_star), config)?;
    let difference = low.iter().zip(&high).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
    if difference > config.agreement {
        return Err(SteadyError::NonUnique { difference });
    }
    Ok(EquilibriumProfile {
        l,
        samples: xs.into_iter().zip(low).collect(),
        residual,
        iterations,
    })
}
