//! Time integration of the free-boundary problem on a fixed computational
//! domain.
//!
//! The moving interval `[g(t), h(t)]` is mapped linearly onto `y in [-1, 1]`
//! through `x = (g + h)/2 + y (h - g)/2`. With `s = (h - g)/2` the equation
//! becomes
//!
//! ```text
//! u_t = (d_I / s^2) u_yy - c(y) u_y + (beta - gamma) u - (beta / N*) u^2,
//! c(y) = (alpha - (1 - y)/2 g' - (1 + y)/2 h') / s
//! ```
//!
//! with `u = 0` at `y = +-1` and Stefan front laws `g' = -mu I_x(g)`,
//! `h' = -mu I_x(h)`. Each step is backward Euler solved by damped Newton on
//! the tridiagonal system, wrapped in a predictor-corrector loop on the
//! front positions.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;

use crate::error::{ModelError, SolverError};
use crate::interp;
use crate::model::{FrontState, ModelSpec};
use crate::tridiag::thomas_solve;

/// Smallest admissible number of interior nodes.
pub const MIN_NODES: usize = 16;
/// Fronts must move when the profile exceeds this level.
pub const MOTION_THRESHOLD: f64 = 1e-12;

/// Uniform grid of `n` interior nodes on `[-1, 1]`; the end points carry the
/// Dirichlet value 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    dy: f64,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self, SolverError> {
        if n < MIN_NODES {
            return Err(SolverError::Stencil { min: MIN_NODES, got: n });
        }
        Ok(Grid {
            n,
            dy: 2.0 / (n as f64 + 1.0),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spacing(&self) -> f64 {
        self.dy
    }

    /// Computational coordinate of interior node `j` (0-based).
    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        -1.0 + (j as f64 + 1.0) * self.dy
    }
}

/// Fronts plus the interior profile at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub front: FrontState,
    /// `I` at the interior nodes of the computational grid.
    pub values: Vec<f64>,
}

impl Snapshot {
    pub fn grid(&self) -> Result<Grid, SolverError> {
        Grid::new(self.values.len())
    }

    /// Physical positions of the interior nodes.
    pub fn positions(&self) -> Vec<f64> {
        let n = self.values.len();
        let dy = 2.0 / (n as f64 + 1.0);
        let (m, s) = (self.front.midpoint(), self.front.half_width());
        (0..n).map(|j| m + s * (-1.0 + (j as f64 + 1.0) * dy)).collect()
    }

    /// `(x, I)` pairs including the two fronts where `I = 0`.
    pub fn profile(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.values.len() + 2);
        out.push((self.front.g, 0.0));
        out.extend(self.positions().into_iter().zip(self.values.iter().copied()));
        out.push((self.front.h, 0.0));
        out
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(*v))
    }

    /// Cubic interpolation of the profile at physical `x`; zero outside the
    /// fronts.
    pub fn value_at(&self, x: f64) -> f64 {
        if x <= self.front.g || x >= self.front.h {
            return 0.0;
        }
        let n = self.values.len();
        let dy = 2.0 / (n as f64 + 1.0);
        let y = (x - self.front.midpoint()) / self.front.half_width();
        // padded index: 0 is the left front, n + 1 the right front
        let node = |k: usize| -> f64 {
            if k == 0 || k == n + 1 {
                0.0
            } else {
                self.values[k - 1]
            }
        };
        interp::uniform_cubic(node, n + 2, -1.0, dy, y)
    }
}

/// Front velocities `(g', h')` from the Stefan condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontVelocity {
    pub g_dot: f64,
    pub h_dot: f64,
}

/// Velocities plus whether either exceeds the a-priori bound `C1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityEstimate {
    pub velocity: FrontVelocity,
    pub exceeds_bound: bool,
}

/// Diffusion and convection coefficients of the front-fixed equation at the
/// computational coordinate `y`.
pub fn transform_coefficients(
    front: &FrontState,
    velocity: FrontVelocity,
    y: f64,
    d_i: f64,
    alpha: f64,
) -> Result<(f64, f64), SolverError> {
    if !(front.h > front.g) {
        return Err(ModelError::DegenerateDomain { g: front.g, h: front.h }.into());
    }
    let s = front.half_width();
    let mesh = 0.5 * (1.0 - y) * velocity.g_dot + 0.5 * (1.0 + y) * velocity.h_dot;
    Ok((d_i / (s * s), (alpha - mesh) / s))
}

/// One-sided second-order boundary slopes `(I_x(g), I_x(h))` of a profile
/// given at the interior nodes of an interval of half-width `s`.
fn boundary_slopes(values: &[f64], half_width: f64) -> (f64, f64) {
    let n = values.len();
    let dy = 2.0 / (n as f64 + 1.0);
    // (-3 u(-1) + 4 u_1 - u_2) / (2 dy) with u(-1) = 0, mirrored at y = 1
    let left = (4.0 * values[0] - values[1]) / (2.0 * dy);
    let right = (values[n - 2] - 4.0 * values[n - 1]) / (2.0 * dy);
    (left / half_width, right / half_width)
}

/// Stefan velocities `g' = -mu I_x(g)`, `h' = -mu I_x(h)`.
///
/// `bound` is the a-priori speed limit; exceeding it is flagged, not clamped.
pub fn stefan_velocity(snapshot: &Snapshot, mu: f64, bound: f64) -> Result<VelocityEstimate, SolverError> {
    if snapshot.values.len() < 3 {
        return Err(SolverError::Stencil {
            min: 3,
            got: snapshot.values.len(),
        });
    }
    if !(snapshot.front.h > snapshot.front.g) {
        return Err(ModelError::DegenerateDomain {
            g: snapshot.front.g,
            h: snapshot.front.h,
        }
        .into());
    }
    let (left, right) = boundary_slopes(&snapshot.values, snapshot.front.half_width());
    let velocity = FrontVelocity {
        g_dot: -mu * left,
        h_dot: -mu * right,
    };
    Ok(VelocityEstimate {
        velocity,
        exceeds_bound: velocity.g_dot.abs() > bound || velocity.h_dot.abs() > bound,
    })
}

/// Solver tolerances and discretisation. Defaults follow the documented
/// values; every field can be overridden.
#[derive(Debug, Clone, PartialEq)]
pub struct Numerics {
    pub dt: f64,
    /// Interior nodes of the computational grid.
    pub n: usize,
    /// Snapshots (and R0 samples) are kept every `output_stride` steps.
    pub output_stride: usize,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub outer_tol: f64,
    pub outer_max_iter: usize,
    pub clip_tol: f64,
    pub max_halvings: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics {
            dt: 1e-2,
            n: 200,
            output_stride: 100,
            newton_tol: 1e-10,
            newton_max_iter: 25,
            outer_tol: 1e-9,
            outer_max_iter: 20,
            clip_tol: 1e-8,
            max_halvings: 10,
        }
    }
}

impl Numerics {
    pub fn check(&self) -> Result<(), SolverError> {
        let positive = [
            ("dt", self.dt),
            ("newton_tol", self.newton_tol),
            ("outer_tol", self.outer_tol),
            ("clip_tol", self.clip_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(SolverError::Numerics(format!("{name} must be positive, got {v}")));
            }
        }
        if self.output_stride == 0 || self.newton_max_iter == 0 || self.outer_max_iter == 0 {
            return Err(SolverError::Numerics(String::from(
                "output_stride and iteration limits must be at least 1",
            )));
        }
        Grid::new(self.n).map(|_| ())
    }
}

/// Iteration counts of one accepted step.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepStats {
    pub newton_iterations: usize,
    pub outer_iterations: usize,
    pub clipped: bool,
    pub peclet_exceeded: bool,
}

/// Front data recorded at every accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontRecord {
    pub t: f64,
    pub g: f64,
    pub h: f64,
    pub g_dot: f64,
    pub h_dot: f64,
    pub sup_i: f64,
}

/// Aggregate warnings collected during a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunDiagnostics {
    pub accepted_steps: usize,
    pub halvings: usize,
    pub clipped_steps: usize,
    pub peclet_warnings: usize,
    /// Steps whose Stefan velocity exceeded the a-priori bound.
    pub bound_violations: usize,
    /// Steps where a front failed to move outward while `sup I > 1e-12`.
    pub monotonicity_violations: usize,
    pub max_speed: f64,
    pub velocity_bound: f64,
    /// Minimum and maximum nodal value before clipping over the whole run.
    pub min_value: f64,
    pub max_value: f64,
    pub stopped_early: bool,
}

/// Output of one simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    pub front_history: Vec<FrontRecord>,
    /// `(t, R0^F(t))` samples, filled by an observer.
    pub r0f_history: Vec<(f64, f64)>,
    pub diagnostics: RunDiagnostics,
    pub t_end: f64,
}

impl Trajectory {
    pub fn last_snapshot(&self) -> &Snapshot {
        self.snapshots.last().expect("trajectory holds the initial snapshot")
    }

    pub fn final_front(&self) -> FrontState {
        let r = self.front_history.last().expect("non-empty history");
        FrontState { t: r.t, g: r.g, h: r.h }
    }
}

/// Returned by observers to continue or end a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

/// Hook called after every nominal step (and once at `t = 0` with step 0).
pub trait Observer {
    fn observe(
        &mut self,
        step: usize,
        snapshot: &Snapshot,
        trajectory: &mut Trajectory,
    ) -> Result<Control, SolverError>;
}

impl<F> Observer for F
where
    F: FnMut(usize, &Snapshot, &mut Trajectory) -> Result<Control, SolverError>,
{
    fn observe(
        &mut self,
        step: usize,
        snapshot: &Snapshot,
        trajectory: &mut Trajectory,
    ) -> Result<Control, SolverError> {
        self(step, snapshot, trajectory)
    }
}

/// Observer that never intervenes.
pub struct NoObserver;

impl Observer for NoObserver {
    fn observe(&mut self, _: usize, _: &Snapshot, _: &mut Trajectory) -> Result<Control, SolverError> {
        Ok(Control::Continue)
    }
}

/// Implicit stepper bound to one model and grid; owns its work arrays.
pub struct Stepper<'a> {
    spec: &'a ModelSpec,
    numerics: Numerics,
    grid: Grid,
    velocity_bound: f64,
    constant_rates: Option<(f64, f64)>,
    growth: Vec<f64>,
    crowding: Vec<f64>,
    convection: Vec<f64>,
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    residual: Vec<f64>,
    trial: Vec<f64>,
    candidate: Vec<f64>,
    scratch: Vec<f64>,
    last_extremes: (f64, f64),
}

impl<'a> Stepper<'a> {
    pub fn new(spec: &'a ModelSpec, numerics: Numerics) -> Result<Self, SolverError> {
        numerics.check()?;
        let grid = Grid::new(numerics.n)?;
        let n = grid.len();
        let constant_rates = if spec.beta.is_constant() && spec.gamma.is_constant() {
            let b = spec.beta_at(0.0);
            Some((b - spec.gamma_at(0.0), b / spec.n_star))
        } else {
            None
        };
        Ok(Stepper {
            spec,
            velocity_bound: spec.velocity_bound(),
            numerics,
            grid,
            constant_rates,
            growth: vec![0.0; n],
            crowding: vec![0.0; n],
            convection: vec![0.0; n],
            lower: vec![0.0; n],
            diag: vec![0.0; n],
            upper: vec![0.0; n],
            residual: vec![0.0; n],
            trial: vec![0.0; n],
            candidate: vec![0.0; n],
            scratch: vec![0.0; n],
            last_extremes: (0.0, 0.0),
        })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn numerics(&self) -> &Numerics {
        &self.numerics
    }

    pub fn velocity_bound(&self) -> f64 {
        self.velocity_bound
    }

    /// Samples the initial profile on the grid at `t = 0`.
    pub fn initial_snapshot(&self) -> Snapshot {
        let h0 = self.spec.h0;
        Snapshot {
            front: FrontState { t: 0.0, g: -h0, h: h0 },
            values: (0..self.grid.len())
                .map(|j| self.spec.i0_at(h0 * self.grid.y(j)))
                .collect(),
        }
    }

    pub fn velocity(&self, snapshot: &Snapshot) -> Result<VelocityEstimate, SolverError> {
        stefan_velocity(snapshot, self.spec.mu, self.velocity_bound)
    }

    fn prepare_coefficients(&mut self, g: f64, h: f64, velocity: FrontVelocity) -> bool {
        let s = 0.5 * (h - g);
        let m = 0.5 * (h + g);
        let diffusion = self.spec.d_i / (s * s);
        let mut peclet_exceeded = false;
        for j in 0..self.grid.len() {
            let y = self.grid.y(j);
            let mesh = 0.5 * (1.0 - y) * velocity.g_dot + 0.5 * (1.0 + y) * velocity.h_dot;
            let c = (self.spec.alpha - mesh) / s;
            self.convection[j] = c;
            if c.abs() * self.grid.spacing() / diffusion > 2.0 {
                peclet_exceeded = true;
            }
            match self.constant_rates {
                Some((r, k)) => {
                    self.growth[j] = r;
                    self.crowding[j] = k;
                }
                None => {
                    let x = m + s * y;
                    let b = self.spec.beta_at(x);
                    self.growth[j] = b - self.spec.gamma_at(x);
                    self.crowding[j] = b / self.spec.n_star;
                }
            }
        }
        peclet_exceeded
    }

    /// Residual of the backward-Euler system into `self.residual`; returns
    /// its sup-norm.
    fn residual_into(&mut self, u: &[f64], old: &[f64], dt: f64, diffusion: f64, use_trial: bool) -> f64 {
        let n = self.grid.len();
        let dy = self.grid.spacing();
        let a = diffusion / (dy * dy);
        let b = 1.0 / (2.0 * dy);
        let mut norm = 0.0f64;
        for j in 0..n {
            let left = if j > 0 { u[j - 1] } else { 0.0 };
            let right = if j + 1 < n { u[j + 1] } else { 0.0 };
            let rhs = a * (left - 2.0 * u[j] + right) - self.convection[j] * b * (right - left) + self.growth[j] * u[j]
                - self.crowding[j] * u[j] * u[j];
            let r = u[j] - old[j] - dt * rhs;
            norm = norm.max(r.abs());
            if !use_trial {
                self.residual[j] = r;
            }
        }
        norm
    }

    /// Damped Newton for the interior values at fixed fronts and mesh velocity.
    fn newton(
        &mut self,
        u: &mut [f64],
        old: &[f64],
        dt: f64,
        half_width: f64,
        t: f64,
        outer: usize,
    ) -> Result<usize, SolverError> {
        let n = self.grid.len();
        let dy = self.grid.spacing();
        let diffusion = self.spec.d_i / (half_width * half_width);
        let a = diffusion / (dy * dy);
        let b = 1.0 / (2.0 * dy);
        let mut norm = self.residual_into(u, old, dt, diffusion, false);
        for iter in 0..=self.numerics.newton_max_iter {
            if !norm.is_finite() {
                break;
            }
            if norm < self.numerics.newton_tol {
                return Ok(iter);
            }
            if iter == self.numerics.newton_max_iter {
                break;
            }
            #[allow(clippy::needless_range_loop)] // six parallel arrays
            for j in 0..n {
                let c = self.convection[j] * b;
                self.lower[j] = -dt * (a + c);
                self.upper[j] = -dt * (a - c);
                self.diag[j] = 1.0 + dt * (2.0 * a - self.growth[j] + 2.0 * self.crowding[j] * u[j]);
                self.trial[j] = -self.residual[j];
            }
            if !thomas_solve(&self.lower, &self.diag, &self.upper, &mut self.trial, &mut self.scratch) {
                return Err(SolverError::StepFailure {
                    t,
                    dt,
                    reason: "singular Newton Jacobian",
                    newton_iterations: iter,
                    outer_iterations: outer,
                    residual: norm,
                });
            }
            let mut candidate = core::mem::take(&mut self.candidate);
            let mut lambda = 1.0;
            let mut accepted = false;
            for _ in 0..12 {
                for j in 0..n {
                    candidate[j] = u[j] + lambda * self.trial[j];
                }
                let trial_norm = self.residual_into(&candidate, old, dt, diffusion, true);
                if trial_norm.is_finite() && trial_norm <= (1.0 - 1e-4 * lambda) * norm {
                    accepted = true;
                    break;
                }
                lambda *= 0.5;
            }
            if !accepted {
                // no decrease along the Newton direction: take the full step
                // and let the iteration limit decide
                for j in 0..n {
                    candidate[j] = u[j] + self.trial[j];
                }
            }
            u.copy_from_slice(&candidate);
            self.candidate = candidate;
            norm = self.residual_into(u, old, dt, diffusion, false);
        }
        Err(SolverError::StepFailure {
            t,
            dt,
            reason: "Newton did not converge",
            newton_iterations: self.numerics.newton_max_iter,
            outer_iterations: outer,
            residual: norm,
        })
    }

    /// Advances `snapshot` by `dt`: predictor with the current Stefan
    /// velocities, then Newton solves alternated with corrector front
    /// updates until the fronts settle.
    pub fn step(
        &mut self,
        snapshot: &Snapshot,
        dt: f64,
    ) -> Result<(Snapshot, VelocityEstimate, StepStats), SolverError> {
        if !(dt > 0.0) {
            return Err(SolverError::Numerics(format!("dt must be positive, got {dt}")));
        }
        if snapshot.values.len() != self.grid.len() {
            return Err(SolverError::Numerics(format!(
                "snapshot has {} nodes, stepper grid has {}",
                snapshot.values.len(),
                self.grid.len()
            )));
        }
        let FrontState { t, g, h } = snapshot.front;
        let t_new = t + dt;
        let mut estimate = self.velocity(snapshot)?;
        let mut g_new = g + dt * estimate.velocity.g_dot;
        let mut h_new = h + dt * estimate.velocity.h_dot;
        let mut u = snapshot.values.clone();
        let mut stats = StepStats::default();
        let mut settled = false;
        for outer in 1..=self.numerics.outer_max_iter {
            stats.outer_iterations = outer;
            if !(h_new > g_new) {
                return Err(SolverError::StepFailure {
                    t,
                    dt,
                    reason: "fronts crossed",
                    newton_iterations: stats.newton_iterations,
                    outer_iterations: outer,
                    residual: f64::NAN,
                });
            }
            stats.peclet_exceeded |= self.prepare_coefficients(g_new, h_new, estimate.velocity);
            stats.newton_iterations += self.newton(&mut u, &snapshot.values, dt, 0.5 * (h_new - g_new), t, outer)?;
            let trial = Snapshot {
                front: FrontState {
                    t: t_new,
                    g: g_new,
                    h: h_new,
                },
                values: u.clone(),
            };
            estimate = self.velocity(&trial)?;
            let g_next = g + dt * estimate.velocity.g_dot;
            let h_next = h + dt * estimate.velocity.h_dot;
            let change = (g_next - g_new).abs().max((h_next - h_new).abs());
            g_new = g_next;
            h_new = h_next;
            if change < self.numerics.outer_tol * (h_new - g_new) {
                settled = true;
                break;
            }
        }
        if !settled {
            return Err(SolverError::StepFailure {
                t,
                dt,
                reason: "front predictor-corrector did not settle",
                newton_iterations: stats.newton_iterations,
                outer_iterations: stats.outer_iterations,
                residual: f64::NAN,
            });
        }

        let (lo, hi) = u.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(*v), hi.max(*v))
        });
        let cap = self.spec.n_star;
        if lo < -self.numerics.clip_tol || hi > cap + self.numerics.clip_tol {
            return Err(SolverError::StepFailure {
                t,
                dt,
                reason: "values left [0, N*] beyond the clipping tolerance",
                newton_iterations: stats.newton_iterations,
                outer_iterations: stats.outer_iterations,
                residual: if lo < 0.0 { -lo } else { hi - cap },
            });
        }
        if lo < 0.0 || hi > cap {
            stats.clipped = true;
            for v in &mut u {
                *v = v.clamp(0.0, cap);
            }
        }
        self.last_extremes = (lo, hi);
        Ok((
            Snapshot {
                front: FrontState {
                    t: t_new,
                    g: g_new,
                    h: h_new,
                },
                values: u,
            },
            estimate,
            stats,
        ))
    }
}

impl Stepper<'_> {
    /// Node-value extremes of the last accepted step before clipping.
    pub fn last_extremes(&self) -> (f64, f64) {
        self.last_extremes
    }
}

/// Integrates from the initial data to `t_end`.
///
/// Steps of size `numerics.dt` are attempted; a failed step is retried with
/// half the step size, up to `numerics.max_halvings` times in a row. The
/// observer sees step 0 (the initial state) and every nominal step after it
/// and may stop the run early.
pub fn run(
    spec: &ModelSpec,
    numerics: &Numerics,
    t_end: f64,
    observer: &mut dyn Observer,
) -> Result<Trajectory, SolverError> {
    let violations = spec.validate()?;
    if !violations.is_empty() {
        let text: Vec<String> = violations.iter().map(|v| format!("{v}")).collect();
        return Err(ModelError::Invalid(text.join("; ")).into());
    }
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(SolverError::Numerics(format!("t_end must be positive, got {t_end}")));
    }
    let mut stepper = Stepper::new(spec, numerics.clone())?;
    let mut current = stepper.initial_snapshot();
    let initial = stepper.velocity(&current)?;

    let mut trajectory = Trajectory {
        snapshots: vec![current.clone()],
        front_history: vec![FrontRecord {
            t: 0.0,
            g: current.front.g,
            h: current.front.h,
            g_dot: initial.velocity.g_dot,
            h_dot: initial.velocity.h_dot,
            sup_i: current.sup(),
        }],
        r0f_history: Vec::new(),
        diagnostics: RunDiagnostics {
            velocity_bound: stepper.velocity_bound(),
            min_value: current.values.iter().fold(f64::INFINITY, |m, v| m.min(*v)),
            max_value: current.sup(),
            ..RunDiagnostics::default()
        },
        t_end,
    };
    if observer.observe(0, &current, &mut trajectory)? == Control::Stop {
        trajectory.diagnostics.stopped_early = true;
        return Ok(trajectory);
    }

    let dt = numerics.dt;
    let steps = ((t_end / dt) - 1e-9).ceil().max(1.0) as usize;
    for k in 1..=steps {
        let target = if k == steps { t_end } else { k as f64 * dt };
        let mut trial_dt = target - current.front.t;
        let mut halvings = 0;
        while current.front.t < target {
            let remaining = target - current.front.t;
            let this_dt = trial_dt.min(remaining);
            match stepper.step(&current, this_dt) {
                Ok((mut next, estimate, stats)) => {
                    if (target - next.front.t).abs() <= 1e-12 * target.max(1.0) {
                        next.front.t = target;
                    }
                    let d = &mut trajectory.diagnostics;
                    let (lo, hi) = stepper.last_extremes();
                    d.min_value = d.min_value.min(lo);
                    d.max_value = d.max_value.max(hi);
                    d.accepted_steps += 1;
                    d.clipped_steps += stats.clipped as usize;
                    d.peclet_warnings += stats.peclet_exceeded as usize;
                    d.bound_violations += estimate.exceeds_bound as usize;
                    let v = estimate.velocity;
                    d.max_speed = d.max_speed.max(v.g_dot.abs()).max(v.h_dot.abs());
                    let moved_out = next.front.g < current.front.g && next.front.h > current.front.h;
                    if current.sup() > MOTION_THRESHOLD && !moved_out {
                        d.monotonicity_violations += 1;
                    }
                    trajectory.front_history.push(FrontRecord {
                        t: next.front.t,
                        g: next.front.g,
                        h: next.front.h,
                        g_dot: v.g_dot,
                        h_dot: v.h_dot,
                        sup_i: next.sup(),
                    });
                    current = next;
                }
                Err(err @ SolverError::StepFailure { .. }) => {
                    halvings += 1;
                    trajectory.diagnostics.halvings += 1;
                    if halvings > numerics.max_halvings {
                        return Err(SolverError::DtExhausted {
                            t: current.front.t,
                            halvings: numerics.max_halvings,
                            last: alloc::boxed::Box::new(err),
                        });
                    }
                    trial_dt = this_dt * 0.5;
                }
                Err(other) => return Err(other),
            }
        }
        let keep = k % numerics.output_stride == 0 || k == steps;
        if keep {
            trajectory.snapshots.push(current.clone());
        }
        if observer.observe(k, &current, &mut trajectory)? == Control::Stop {
            if !keep {
                trajectory.snapshots.push(current.clone());
            }
            trajectory.diagnostics.stopped_early = true;
            break;
        }
    }
    Ok(trajectory)
}
