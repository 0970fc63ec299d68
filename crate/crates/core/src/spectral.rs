//! Principal eigenvalues and basic reproduction numbers on an interval.
//!
//! Every eigenproblem is first symmetrised with `psi = exp(alpha x / (2 d_I)) phi`,
//! which turns the advective operator into
//! `-d_I phi'' + (alpha^2/(4 d_I) + gamma - beta) phi` with Dirichlet ends.
//! The reproduction number `R0^DA` is the reciprocal of the lowest value of
//! the pencil `-d_I phi'' + (alpha^2/(4 d_I) + gamma) phi = nu beta phi`.
//! Both are discretised with centred differences on two nested grids and
//! Richardson-extrapolated.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;

use crate::error::{ModelError, SpectralError};
use crate::frontfix::Trajectory;
use crate::model::ModelSpec;
use crate::tridiag::SymTridiagonal;

/// Slack allowed for decreases of a sampled `R0^F(t)` series.
pub const MONOTONE_SLACK: f64 = 1e-8;

/// Resolution and tolerances of the spectral solves.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralConfig {
    /// Coarse-grid cells per unit length; the fine grid doubles this.
    pub cells_per_unit: f64,
    pub min_cells: usize,
    pub max_cells: usize,
    /// Relative tolerance of the Sturm bisection.
    pub eigen_rtol: f64,
    /// Relative tolerance of the inverse iteration for `R0`.
    pub r0_rtol: f64,
    pub max_sweeps: usize,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig {
            cells_per_unit: 20.0,
            min_cells: 200,
            max_cells: 8000,
            eigen_rtol: 1e-12,
            r0_rtol: 1e-10,
            max_sweeps: 10_000,
        }
    }
}

impl SpectralConfig {
    /// Coarse-grid cell count for an interval of the given width.
    pub fn cells_for(&self, width: f64) -> usize {
        let wanted = (width * self.cells_per_unit).ceil();
        let wanted = if wanted.is_finite() {
            wanted as usize
        } else {
            self.max_cells
        };
        wanted.clamp(self.min_cells, self.max_cells.max(self.min_cells))
    }
}

/// Principal eigenvalue, reproduction number and eigenfunction on one interval.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult {
    pub interval: (f64, f64),
    pub lambda0: f64,
    pub r0: f64,
    /// `(x, psi(x))` at the fine-grid nodes, `max psi = 1`.
    pub eigenfunction: Vec<(f64, f64)>,
}

/// Lowest eigenvalue of the advective Dirichlet problem.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalEigen {
    pub lambda0: f64,
    /// Unextrapolated values on the coarse and fine grids.
    pub lambda_coarse: f64,
    pub lambda_fine: f64,
    /// `(x, psi(x))` on the fine grid, normalised to unit sup-norm.
    pub eigenfunction: Vec<(f64, f64)>,
}

/// Reproduction number of the advective Dirichlet problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ReproductionNumber {
    pub r0: f64,
    pub r0_coarse: f64,
    pub r0_fine: f64,
    /// Symmetrised eigenfunction `phi` on the fine grid (`(x, phi)`), unit
    /// sup-norm; it maximises the weighted Rayleigh quotient.
    pub phi: Vec<(f64, f64)>,
    /// Fine-grid spacing.
    pub spacing: f64,
}

struct Discretisation {
    nodes: Vec<f64>,
    spacing: f64,
}

fn discretise(g0: f64, h0: f64, cells: usize) -> Discretisation {
    let spacing = (h0 - g0) / cells as f64;
    Discretisation {
        nodes: (1..cells).map(|j| g0 + spacing * j as f64).collect(),
        spacing,
    }
}

fn check_interval(g0: f64, h0: f64, cells: usize) -> Result<(), SpectralError> {
    if !(h0 > g0) {
        return Err(ModelError::DegenerateDomain { g: g0, h: h0 }.into());
    }
    if cells < 4 {
        return Err(SpectralError::Resolution { g: g0, h: h0, cells });
    }
    Ok(())
}

fn stiffness(spec: &ModelSpec, disc: &Discretisation, with_beta: bool) -> SymTridiagonal {
    let d = spec.d_i;
    let h2 = disc.spacing * disc.spacing;
    let drift = spec.alpha * spec.alpha / (4.0 * d);
    let diag = disc
        .nodes
        .iter()
        .map(|&x| {
            let mut v = 2.0 * d / h2 + drift + spec.gamma_at(x);
            if with_beta {
                v -= spec.beta_at(x);
            }
            v
        })
        .collect();
    let off = vec![-d / h2; disc.nodes.len() - 1];
    SymTridiagonal::new(diag, off)
}

fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

fn lowest_on(
    spec: &ModelSpec,
    g0: f64,
    h0: f64,
    cells: usize,
    rtol: f64,
    max_sweeps: usize,
) -> Result<(f64, Discretisation, Vec<f64>), SpectralError> {
    let disc = discretise(g0, h0, cells);
    let t = stiffness(spec, &disc, true);
    let pair = t
        .lowest_eigenpair(None, rtol, max_sweeps)
        .map_err(|(sweeps, residual)| SpectralError::NoConvergence { sweeps, residual })?;
    Ok((pair.value, disc, pair.vector))
}

/// Principal eigenvalue of `-d_I psi'' + alpha psi' = (beta - gamma) psi + lambda psi`
/// on `(g0, h0)` with Dirichlet ends, and its positive eigenfunction.
pub fn principal_eigenvalue(
    interval: (f64, f64),
    spec: &ModelSpec,
    config: &SpectralConfig,
) -> Result<PrincipalEigen, SpectralError> {
    let (g0, h0) = interval;
    let cells = config.cells_for(h0 - g0);
    check_interval(g0, h0, cells)?;
    let (coarse, _, _) = lowest_on(spec, g0, h0, cells, config.eigen_rtol, config.max_sweeps)?;
    let (fine, disc, phi) = lowest_on(spec, g0, h0, 2 * cells, config.eigen_rtol, config.max_sweeps)?;

    let mid = 0.5 * (g0 + h0);
    let k = spec.alpha / (2.0 * spec.d_i);
    let mut psi: Vec<(f64, f64)> = disc
        .nodes
        .iter()
        .zip(&phi)
        .map(|(&x, &p)| (x, (k * (x - mid)).exp() * p))
        .collect();
    let top = psi.iter().fold(0.0f64, |m, (_, v)| m.max(*v));
    for p in &mut psi {
        p.1 /= top;
    }
    Ok(PrincipalEigen {
        lambda0: richardson(coarse, fine),
        lambda_coarse: coarse,
        lambda_fine: fine,
        eigenfunction: psi,
    })
}

fn r0_on(
    spec: &ModelSpec,
    g0: f64,
    h0: f64,
    cells: usize,
    config: &SpectralConfig,
) -> Result<(f64, Discretisation, Vec<f64>), SpectralError> {
    let disc = discretise(g0, h0, cells);
    let a = stiffness(spec, &disc, false);
    let weight: Vec<f64> = disc.nodes.iter().map(|&x| spec.beta_at(x)).collect();
    if weight.iter().any(|w| !(*w > 0.0)) {
        return Err(SpectralError::Argument(String::from(
            "beta must be positive on the interval",
        )));
    }
    let pair = a
        .lowest_eigenpair(Some(&weight), config.r0_rtol, config.max_sweeps)
        .map_err(|(sweeps, residual)| SpectralError::NoConvergence { sweeps, residual })?;
    Ok((1.0 / pair.value, disc, pair.vector))
}

/// `R0^DA` on `(g0, h0)`: the maximum over `H^1_0` of
/// `int beta psi^2 / int (d_I psi_x^2 + (alpha^2/(4 d_I) + gamma) psi^2)`.
pub fn r0_dirichlet_advection(
    interval: (f64, f64),
    spec: &ModelSpec,
    config: &SpectralConfig,
) -> Result<ReproductionNumber, SpectralError> {
    let (g0, h0) = interval;
    let cells = config.cells_for(h0 - g0);
    check_interval(g0, h0, cells)?;
    let (coarse, _, _) = r0_on(spec, g0, h0, cells, config)?;
    let (fine, disc, phi) = r0_on(spec, g0, h0, 2 * cells, config)?;
    // extrapolate the pencil eigenvalue 1/R0, which is what the grid discretises
    let nu = richardson(1.0 / coarse, 1.0 / fine);
    Ok(ReproductionNumber {
        r0: 1.0 / nu,
        r0_coarse: coarse,
        r0_fine: fine,
        phi: disc.nodes.iter().copied().zip(phi).collect(),
        spacing: disc.spacing,
    })
}

/// Both quantities at once.
pub fn analyze(
    interval: (f64, f64),
    spec: &ModelSpec,
    config: &SpectralConfig,
) -> Result<SpectralResult, SpectralError> {
    let eig = principal_eigenvalue(interval, spec, config)?;
    let r0 = r0_dirichlet_advection(interval, spec, config)?;
    Ok(SpectralResult {
        interval,
        lambda0: eig.lambda0,
        r0: r0.r0,
        eigenfunction: eig.eigenfunction,
    })
}

/// `R0^F(t)` at every stored snapshot of a trajectory.
///
/// Fails with [`SpectralError::NotMonotone`] if the sampled series decreases
/// by more than [`MONOTONE_SLACK`].
pub fn r0_free_series(
    trajectory: &Trajectory,
    spec: &ModelSpec,
    config: &SpectralConfig,
) -> Result<Vec<(f64, f64)>, SpectralError> {
    if trajectory.snapshots.is_empty() {
        return Err(SpectralError::Empty);
    }
    let mut series: Vec<(f64, f64)> = Vec::with_capacity(trajectory.snapshots.len());
    for snap in &trajectory.snapshots {
        let r0 = r0_dirichlet_advection((snap.front.g, snap.front.h), spec, config)?.r0;
        series.push((snap.front.t, r0));
    }
    check_monotone(&series)?;
    Ok(series)
}

/// Checks that a `(t, R0)` series never decreases by more than the slack.
pub fn check_monotone(series: &[(f64, f64)]) -> Result<(), SpectralError> {
    for w in series.windows(2) {
        let ((t0, r0), (t1, r1)) = (w[0], w[1]);
        if r1 < r0 - MONOTONE_SLACK {
            return Err(SpectralError::NotMonotone { t0, r0, t1, r1 });
        }
    }
    Ok(())
}

/// One sampled point of a monotonicity probe.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRow {
    pub parameter: &'static str,
    pub value: f64,
    pub r0: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProbeReport {
    pub rows: Vec<ProbeRow>,
    pub checks: Vec<ProbeCheck>,
}

impl ProbeReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub const ALPHA_LADDER: [f64; 4] = [0.0, 0.5, 1.0, 1.5];
pub const DIFFUSION_LADDER: [f64; 9] = [0.05, 0.1, 0.5, 1.0, 4.0, 16.0, 64.0, 256.0, 1024.0];
pub const INTERVAL_SCALES: [f64; 3] = [1.0, 2.0, 4.0];
pub const FAR_HALF_WIDTH: f64 = 50.0;
pub const FAR_FIELD_TOLERANCE: f64 = 0.05;

/// Samples `R0^DA` along ladders in `alpha`, `d_I` and nested intervals and
/// checks the expected monotonicity and limits.
pub fn r0_properties_probe(
    spec: &ModelSpec,
    interval: (f64, f64),
    config: &SpectralConfig,
) -> Result<ProbeReport, SpectralError> {
    let mut report = ProbeReport::default();
    let r0 = |s: &ModelSpec, iv: (f64, f64)| r0_dirichlet_advection(iv, s, config).map(|r| r.r0);

    let sign = if spec.alpha < 0.0 { -1.0 } else { 1.0 };
    let mut alpha_values = Vec::new();
    for a in ALPHA_LADDER {
        let v = r0(&spec.with_alpha(sign * a), interval)?;
        report.rows.push(ProbeRow {
            parameter: "alpha",
            value: sign * a,
            r0: v,
        });
        alpha_values.push(v);
    }
    let ok = alpha_values.windows(2).all(|w| w[1] <= w[0] + MONOTONE_SLACK);
    report.checks.push(ProbeCheck {
        name: "non-increasing in |alpha|",
        passed: ok,
        detail: format!("{alpha_values:?}"),
    });

    let mut d_values = Vec::new();
    for d in DIFFUSION_LADDER {
        let v = r0(&spec.with_diffusion(d), interval)?;
        report.rows.push(ProbeRow {
            parameter: "d_I",
            value: d,
            r0: v,
        });
        d_values.push(v);
    }
    let upper = &d_values[3..];
    let peak = d_values.iter().fold(0.0f64, |m, v| m.max(*v));
    let last = *d_values.last().unwrap_or(&0.0);
    report.checks.push(ProbeCheck {
        name: "decreases toward 0 as d_I grows",
        passed: upper.windows(2).all(|w| w[1] < w[0]) && last < 0.05 * peak,
        detail: format!("{upper:?}"),
    });
    if spec.alpha != 0.0 {
        report.checks.push(ProbeCheck {
            name: "decreases toward 0 as d_I shrinks (alpha != 0)",
            passed: d_values[0] < d_values[1] && d_values[1] < d_values[2],
            detail: format!("{:?}", &d_values[..3]),
        });
    }

    let (g0, h0) = interval;
    let mid = 0.5 * (g0 + h0);
    let half = 0.5 * (h0 - g0);
    let mut nested = Vec::new();
    for scale in INTERVAL_SCALES {
        let iv = (mid - scale * half, mid + scale * half);
        let v = r0(spec, iv)?;
        report.rows.push(ProbeRow {
            parameter: "half_width",
            value: scale * half,
            r0: v,
        });
        nested.push(v);
    }
    report.checks.push(ProbeCheck {
        name: "strictly increasing on nested intervals",
        passed: nested.windows(2).all(|w| w[1] > w[0]),
        detail: format!("{nested:?}"),
    });

    let far = r0(spec, (-FAR_HALF_WIDTH, FAR_HALF_WIDTH))?;
    report.rows.push(ProbeRow {
        parameter: "half_width",
        value: FAR_HALF_WIDTH,
        r0: far,
    });
    let floor = far_field_floor(spec);
    report.checks.push(ProbeCheck {
        name: "large-interval R0 reaches the far-field floor",
        passed: far >= (1.0 - FAR_FIELD_TOLERANCE) * floor,
        detail: format!("R0(-{FAR_HALF_WIDTH}, {FAR_HALF_WIDTH}) = {far}, floor = {floor}"),
    });
    Ok(report)
}

/// `beta_inf / (alpha^2 / (4 d_I) + gamma_inf)`, the lower bound for `R0^DA`
/// on arbitrarily long intervals.
pub fn far_field_floor(spec: &ModelSpec) -> f64 {
    spec.beta_inf / (spec.alpha * spec.alpha / (4.0 * spec.d_i) + spec.gamma_inf)
}

pub const DIFFUSION_MIN: f64 = 1e-6;
pub const DIFFUSION_MAX: f64 = 1e6;

/// The diffusion rate `d_I*` at which `R0^D` (no advection) crosses 1 on the
/// interval. Returns 0 when the interval is site-wise low-risk and
/// `R0^D < 1` already at [`DIFFUSION_MIN`].
pub fn threshold_diffusion(
    spec: &ModelSpec,
    interval: (f64, f64),
    config: &SpectralConfig,
) -> Result<f64, SpectralError> {
    if spec.alpha != 0.0 {
        return Err(SpectralError::Argument(String::from(
            "the diffusion threshold is defined without advection (alpha = 0)",
        )));
    }
    let r0 = |d: f64| r0_dirichlet_advection(interval, &spec.with_diffusion(d), config).map(|r| r.r0);
    let hi_value = r0(DIFFUSION_MAX)?;
    if hi_value > 1.0 {
        return Err(SpectralError::Bracket {
            d_max: DIFFUSION_MAX,
            r0: hi_value,
        });
    }
    let lo_value = r0(DIFFUSION_MIN)?;
    if lo_value < 1.0 {
        let (g0, h0) = interval;
        let low_risk = (0..=1000).all(|k| {
            let x = g0 + (h0 - g0) * k as f64 / 1000.0;
            spec.beta_at(x) <= spec.gamma_at(x)
        });
        if low_risk {
            return Ok(0.0);
        }
        return Err(SpectralError::Argument(format!(
            "R0^D({DIFFUSION_MIN}) = {lo_value} < 1 although some sites are high-risk; threshold below the probed range"
        )));
    }
    // R0^D decreases in d_I; bisect in log d
    let (mut lo, mut hi) = (DIFFUSION_MIN.ln(), DIFFUSION_MAX.ln());
    for _ in 0..100 {
        if hi - lo < 1e-13 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if r0(mid.exp())? > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}
