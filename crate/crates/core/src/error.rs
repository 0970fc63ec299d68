use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown name '{name}' (only x, pi and sin/cos/tan/exp/log/sqrt/abs/tanh are allowed)")]
    UnknownName { name: String },
    #[error("expression '{expr}' is not finite at x = {x}")]
    NonFinite { expr: String, x: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("far field is not high-risk: a = beta_inf - gamma_inf = {a} must be > 0")]
    NotHighRisk { a: f64 },
    #[error("degenerate domain: left end {g} is not below right end {h}")]
    DegenerateDomain { g: f64, h: f64 },
    #[error("invalid model: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("grid needs at least {min} interior nodes, got {got}")]
    Stencil { min: usize, got: usize },
    #[error(
        "step failed at t = {t} (dt = {dt}): {reason} after {newton_iterations} Newton / \
         {outer_iterations} outer iterations, residual {residual:e}"
    )]
    StepFailure {
        t: f64,
        dt: f64,
        reason: &'static str,
        newton_iterations: usize,
        outer_iterations: usize,
        residual: f64,
    },
    #[error("time step exhausted after {halvings} halvings at t = {t}: {last}")]
    DtExhausted {
        t: f64,
        halvings: usize,
        last: alloc::boxed::Box<SolverError>,
    },
    #[error("invariant violated at t = {t}: {what}")]
    Invariant { t: f64, what: String },
    #[error("invalid numerics: {0}")]
    Numerics(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("interval ({g}, {h}) is resolved by only {cells} cells (need at least 4)")]
    Resolution { g: f64, h: f64, cells: usize },
    #[error("inverse iteration did not converge in {sweeps} sweeps (relative residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },
    #[error("R0 at the largest bracket value d_I = {d_max} is {r0} > 1; widen the bracket")]
    Bracket { d_max: f64, r0: f64 },
    #[error("R0 series decreases between t = {t0} ({r0}) and t = {t1} ({r1})")]
    NotMonotone { t0: f64, r0: f64, t1: f64, r1: f64 },
    #[error("empty trajectory")]
    Empty,
    #[error("invalid argument: {0}")]
    Argument(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SemiWaveError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("no semi-wave: effective speed {c_eff} >= minimal speed {c_min}")]
    NoSemiWave { c_eff: f64, c_min: f64 },
    #[error("integration failed: {0}")]
    Integration(String),
    #[error("state decayed below representable range before q reached 0 (c_eff = {c_eff})")]
    Underflow { c_eff: f64 },
    #[error("matching residual has no sign change on the bracket; samples (k, residual): {samples:?}")]
    Bracket { samples: Vec<(f64, f64)> },
    #[error("invalid parameters: {0}")]
    Parameters(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SteadyError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("Newton diverged; residual history {history:?}")]
    Divergence { history: Vec<f64> },
    #[error("solutions from the two initial guesses differ by {difference:e}; truncation too small?")]
    NonUnique { difference: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid bracket: {0}")]
    Bracket(String),
    #[error("probe at mu = {mu} stayed undetermined up to horizon {horizon}")]
    InconclusiveProbe { mu: f64, horizon: f64 },
    #[error("window [{lo}, {hi}] is not inside the final interval ({g}, {h})")]
    Window { lo: f64, hi: f64, g: f64, h: f64 },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}
