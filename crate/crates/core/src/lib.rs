//! Numerics for a one-dimensional SIS reaction-diffusion-advection model
//! whose infected region `[g(t), h(t)]` expands under Stefan conditions.
//!
//! The crate is `no_std` (it needs `alloc`) and performs no IO:
//!
//! - [`model`]: parameters, coefficient expressions, validation.
//! - [`frontfix`]: front-fixing implicit time integration.
//! - [`spectral`]: principal eigenvalues and reproduction numbers.
//! - [`semiwave`]: semi-wave profiles and asymptotic spreading speeds.
//! - [`steady`]: the endemic equilibrium on a truncated line.
//! - [`dynamics`]: spreading/vanishing classification, the threshold in the
//!   expanding capability, speed fits and attractor checks.

#![no_std]
// `!(x > 0.0)` deliberately rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dynamics;
pub mod error;
pub mod expr;
pub mod frontfix;
pub mod interp;
pub mod model;
pub mod ode;
pub mod semiwave;
pub mod spectral;
pub mod steady;
pub mod tridiag;

pub use error::{AnalysisError, ExprError, ModelError, SemiWaveError, SolverError, SpectralError, SteadyError};
pub use expr::Expr;
pub use model::{BulkRates, FrontState, ModelSpec, Violation};
