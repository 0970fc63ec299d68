//! Model parameters, coefficient evaluation and parameter validation.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;

use crate::error::{ExprError, ModelError};
use crate::expr::Expr;

/// Where the far-field limits are cross-checked.
pub const FAR_PROBE: f64 = 1.0e3;
/// Tolerance of the far-field cross-check.
pub const FAR_TOLERANCE: f64 = 1.0e-2;
/// Tolerance for `I0(+-h0) = 0`.
pub const BOUNDARY_TOLERANCE: f64 = 1.0e-12;

/// All parameters of the free-boundary SIS model.
///
/// Immutable once built; share it by reference across concurrent runs.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    /// Diffusion rate of the infected class.
    pub d_i: f64,
    /// Advection rate; its sign is the drift direction.
    pub alpha: f64,
    /// Expanding capability in the Stefan condition.
    pub mu: f64,
    /// Total population density.
    pub n_star: f64,
    /// Initial half-width of the infected interval.
    pub h0: f64,
    pub beta: Expr,
    pub gamma: Expr,
    pub beta_inf: f64,
    pub gamma_inf: f64,
    /// Initial profile on `[-h0, h0]`.
    pub i0: Expr,
}

/// Far-field rates: `a = beta_inf - gamma_inf`, `b = beta_inf / N*`, and the
/// Fisher minimal speed `2 sqrt(a d_I)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BulkRates {
    pub a: f64,
    pub b: f64,
    pub c_fisher: f64,
}

impl BulkRates {
    /// Far-field value `a / b` of the endemic equilibrium.
    pub fn carrying(&self) -> f64 {
        self.a / self.b
    }
}

/// Fronts at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontState {
    pub t: f64,
    pub g: f64,
    pub h: f64,
}

impl FrontState {
    pub fn width(&self) -> f64 {
        self.h - self.g
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.g + self.h)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.h - self.g)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonPositive {
        name: &'static str,
        value: f64,
    },
    CoefficientNotPositive {
        name: &'static str,
        x: f64,
        value: f64,
    },
    NotHighRisk {
        a: f64,
    },
    LargeAdvection {
        alpha: f64,
        limit: f64,
    },
    InitialNotZeroAtFront {
        x: f64,
        value: f64,
    },
    InitialOutOfRange {
        x: f64,
        value: f64,
    },
    FarFieldMismatch {
        name: &'static str,
        x: f64,
        value: f64,
        expected: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositive { name, value } => {
                write!(f, "{name} must be positive, got {value}")
            }
            Violation::CoefficientNotPositive { name, x, value } => {
                write!(f, "{name}(x) must be positive: {name}({x}) = {value}")
            }
            Violation::NotHighRisk { a } => write!(
                f,
                "far field must be high-risk: beta_inf - gamma_inf = {a} is not positive"
            ),
            Violation::LargeAdvection { alpha, limit } => write!(
                f,
                "small advection required: |alpha| = {} >= 2 sqrt(a d_I) = {limit}",
                alpha.abs()
            ),
            Violation::InitialNotZeroAtFront { x, value } => {
                write!(f, "initial profile must vanish at the fronts: I0({x}) = {value}")
            }
            Violation::InitialOutOfRange { x, value } => {
                write!(f, "initial profile must satisfy 0 < I0 <= N* inside: I0({x}) = {value}")
            }
            Violation::FarFieldMismatch {
                name,
                x,
                value,
                expected,
            } => write!(
                f,
                "{name}({x}) = {value} does not match the declared limit {expected} within {FAR_TOLERANCE}"
            ),
        }
    }
}

impl ModelSpec {
    /// Parses the three coefficient expressions and assembles a spec.
    #[allow(clippy::too_many_arguments)]
    pub fn from_exprs(
        d_i: f64,
        alpha: f64,
        mu: f64,
        n_star: f64,
        h0: f64,
        beta: &str,
        gamma: &str,
        beta_inf: f64,
        gamma_inf: f64,
        i0: &str,
    ) -> Result<Self, ExprError> {
        Ok(ModelSpec {
            d_i,
            alpha,
            mu,
            n_star,
            h0,
            beta: Expr::parse(beta)?,
            gamma: Expr::parse(gamma)?,
            beta_inf,
            gamma_inf,
            i0: Expr::parse(i0)?,
        })
    }

    /// The heterogeneous reference configuration: `N* = 2`, `d_I = 4`,
    /// `h0 = 1`, `I0 = cos(pi x / 2)`, `beta = 4 + 2 sin(x)/(1+x^2)`,
    /// `gamma = 1 + cos(x)/(1+x^2)`.
    pub fn reference(mu: f64, alpha: f64) -> Self {
        Self::from_exprs(
            4.0,
            alpha,
            mu,
            2.0,
            1.0,
            "4 + 2*sin(x)/(1 + x^2)",
            "1 + cos(x)/(1 + x^2)",
            4.0,
            1.0,
            "cos(pi*x/2)",
        )
        .expect("reference expressions parse")
    }

    /// Constant coefficients `beta = beta_inf`, `gamma = gamma_inf` with the
    /// reference initial profile scaled to `h0`.
    pub fn constant(d_i: f64, alpha: f64, mu: f64, n_star: f64, h0: f64, beta: f64, gamma: f64) -> Self {
        let i0 = alloc::format!("cos(pi*x/(2*{h0:?}))");
        ModelSpec {
            d_i,
            alpha,
            mu,
            n_star,
            h0,
            beta: Expr::constant(beta),
            gamma: Expr::constant(gamma),
            beta_inf: beta,
            gamma_inf: gamma,
            i0: Expr::parse(&i0).expect("initial profile parses"),
        }
    }

    #[inline]
    pub fn beta_at(&self, x: f64) -> f64 {
        self.beta.eval_unchecked(x)
    }

    #[inline]
    pub fn gamma_at(&self, x: f64) -> f64 {
        self.gamma.eval_unchecked(x)
    }

    #[inline]
    pub fn i0_at(&self, x: f64) -> f64 {
        self.i0.eval_unchecked(x)
    }

    pub fn with_mu(&self, mu: f64) -> Self {
        ModelSpec { mu, ..self.clone() }
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        ModelSpec { alpha, ..self.clone() }
    }

    pub fn with_diffusion(&self, d_i: f64) -> Self {
        ModelSpec { d_i, ..self.clone() }
    }

    /// `a`, `b` and the Fisher speed; fails when the far field is not high-risk.
    pub fn bulk_rates(&self) -> Result<BulkRates, ModelError> {
        let a = self.beta_inf - self.gamma_inf;
        if a.is_nan() || a <= 0.0 {
            return Err(ModelError::NotHighRisk { a });
        }
        if !(self.n_star > 0.0 && self.d_i > 0.0) {
            return Err(ModelError::Invalid(String::from("N* and d_I must be positive")));
        }
        Ok(BulkRates {
            a,
            b: self.beta_inf / self.n_star,
            c_fisher: 2.0 * (a * self.d_i).sqrt(),
        })
    }

    /// Points at which coefficients are sampled during validation: a dense
    /// grid on `[-h0, h0]` plus a logarithmic ladder out to `FAR_PROBE`.
    pub fn probe_points(&self) -> Vec<f64> {
        let mut pts = Vec::with_capacity(801);
        let inner = 400;
        for k in 0..=inner {
            pts.push(-self.h0 + 2.0 * self.h0 * k as f64 / inner as f64);
        }
        let ladder = 200;
        let (lo, hi) = (self.h0.max(1e-3).ln(), FAR_PROBE.ln());
        for k in 0..=ladder {
            let r = (lo + (hi - lo) * k as f64 / ladder as f64).exp();
            pts.push(r);
            pts.push(-r);
        }
        pts
    }

    /// Returns every violated standing assumption; an empty list means valid.
    ///
    /// Fails only when a coefficient expression cannot be evaluated at a
    /// probe point.
    pub fn validate(&self) -> Result<Vec<Violation>, ModelError> {
        let mut out = Vec::new();
        for (name, value) in [
            ("d_I", self.d_i),
            ("mu", self.mu),
            ("N*", self.n_star),
            ("h0", self.h0),
            ("beta_inf", self.beta_inf),
            ("gamma_inf", self.gamma_inf),
        ] {
            if value.is_nan() || value <= 0.0 {
                out.push(Violation::NonPositive { name, value });
            }
        }
        if !self.alpha.is_finite() {
            return Err(ModelError::Invalid(String::from("alpha must be finite")));
        }

        let mut first_beta = None;
        let mut first_gamma = None;
        for &x in &self.probe_points() {
            let b = self.beta.eval(x)?;
            let g = self.gamma.eval(x)?;
            if b <= 0.0 && first_beta.is_none() {
                first_beta = Some(Violation::CoefficientNotPositive {
                    name: "beta",
                    x,
                    value: b,
                });
            }
            if g <= 0.0 && first_gamma.is_none() {
                first_gamma = Some(Violation::CoefficientNotPositive {
                    name: "gamma",
                    x,
                    value: g,
                });
            }
        }
        out.extend(first_beta);
        out.extend(first_gamma);

        for (name, expr, limit) in [
            ("beta", &self.beta, self.beta_inf),
            ("gamma", &self.gamma, self.gamma_inf),
        ] {
            for x in [-FAR_PROBE, FAR_PROBE] {
                let value = expr.eval(x)?;
                if (value - limit).abs() > FAR_TOLERANCE {
                    out.push(Violation::FarFieldMismatch {
                        name,
                        x,
                        value,
                        expected: limit,
                    });
                }
            }
        }

        let a = self.beta_inf - self.gamma_inf;
        if a <= 0.0 {
            out.push(Violation::NotHighRisk { a });
        } else if self.d_i > 0.0 {
            let limit = 2.0 * (a * self.d_i).sqrt();
            if self.alpha.abs() >= limit {
                out.push(Violation::LargeAdvection {
                    alpha: self.alpha,
                    limit,
                });
            }
        }

        if self.h0 > 0.0 {
            for x in [-self.h0, self.h0] {
                let v = self.i0.eval(x)?;
                if v.abs() > BOUNDARY_TOLERANCE {
                    out.push(Violation::InitialNotZeroAtFront { x, value: v });
                }
            }
            let n = 400;
            for k in 1..n {
                let x = -self.h0 + 2.0 * self.h0 * k as f64 / n as f64;
                let v = self.i0.eval(x)?;
                if !(v > 0.0 && v <= self.n_star) {
                    out.push(Violation::InitialOutOfRange { x, value: v });
                    break;
                }
            }
        }
        Ok(out)
    }

    /// `sup |I0| + sup |I0'|` on `[-h0, h0]`, sampled with centred differences.
    pub fn initial_c1_norm(&self) -> f64 {
        let n = 2000;
        let dx = 2.0 * self.h0 / n as f64;
        let mut sup = 0.0f64;
        let mut sup_d = 0.0f64;
        for k in 0..=n {
            let x = -self.h0 + dx * k as f64;
            sup = sup.max(self.i0_at(x).abs());
            if k < n {
                let d = (self.i0_at(x + dx) - self.i0_at(x)) / dx;
                sup_d = sup_d.max(d.abs());
            }
        }
        sup + sup_d
    }

    /// A-priori front-speed bound `C1 = 2 M N* mu` with
    /// `M = max(|alpha|/d_I + sqrt(beta_max/(2 d_I)), 4 |I0|_C1 / (3 N*))`,
    /// `beta_max` the maximum of beta on `[-h0, h0]`.
    pub fn velocity_bound(&self) -> f64 {
        let n = 400;
        let beta_max = (0..=n)
            .map(|k| self.beta_at(-self.h0 + 2.0 * self.h0 * k as f64 / n as f64))
            .fold(f64::NEG_INFINITY, f64::max);
        let m = (self.alpha.abs() / self.d_i + (beta_max / (2.0 * self.d_i)).sqrt())
            .max(4.0 * self.initial_c1_norm() / (3.0 * self.n_star));
        2.0 * m * self.n_star * self.mu
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_set_is_valid() {
        let spec = ModelSpec::reference(6.0, 1.5);
        assert_eq!(spec.validate().unwrap(), Vec::new());
    }

    #[test]
    fn large_advection_is_reported() {
        let spec = ModelSpec::reference(6.0, 8.0);
        let v = spec.validate().unwrap();
        assert_eq!(v.len(), 1);
        match v[0] {
            Violation::LargeAdvection { alpha, limit } => {
                assert_eq!(alpha, 8.0);
                // 2 sqrt(3 * 4)
                assert!((limit - 6.928203230275509).abs() < 1e-12);
            }
            ref other => panic!("unexpected {other:?}"),
        }
        assert!(alloc::format!("{}", v[0]).contains("small advection"));
    }

    #[test]
    fn constant_initial_profile_violates_boundary() {
        let mut spec = ModelSpec::reference(6.0, 1.5);
        spec.i0 = Expr::parse("1").unwrap();
        let v = spec.validate().unwrap();
        assert!(v.iter().any(|v| matches!(v, Violation::InitialNotZeroAtFront { .. })));
    }

    #[test]
    fn evaluation_failure_names_the_point() {
        let mut spec = ModelSpec::reference(6.0, 1.5);
        spec.beta = Expr::parse("4 + 1/x").unwrap();
        match spec.validate() {
            Err(ModelError::Expr(ExprError::NonFinite { x, .. })) => assert_eq!(x, 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bulk_rates_reference() {
        let r = ModelSpec::reference(6.0, 1.5).bulk_rates().unwrap();
        assert_eq!(r.a, 3.0);
        assert_eq!(r.b, 2.0);
        assert!((r.c_fisher - 4.0 * 3.0f64.sqrt()).abs() < 1e-14);
        assert_eq!(r.carrying(), 1.5);
    }

    #[test]
    fn bulk_rates_degenerate_and_constant() {
        let spec = ModelSpec::constant(4.0, 0.0, 1.0, 2.0, 1.0, 3.0, 3.0);
        assert!(matches!(spec.bulk_rates(), Err(ModelError::NotHighRisk { .. })));
        let gamma = 1.25;
        let spec = ModelSpec::constant(4.0, 0.0, 1.0, 2.0, 1.0, 2.0 * gamma, gamma);
        let r = spec.bulk_rates().unwrap();
        assert_eq!(r.a, gamma);
        assert_eq!(r.b, 2.0 * gamma / 2.0);
    }

    #[test]
    fn far_field_decay_bound() {
        let spec = ModelSpec::reference(6.0, 1.5);
        for k in -2000..=2000 {
            let x = k as f64 * 0.05;
            assert!((spec.beta_at(x) - 4.0).abs() <= 2.0 / (1.0 + x * x) + 1e-15);
            // bit-identical on repeat
            assert_eq!(spec.beta_at(x).to_bits(), spec.beta_at(x).to_bits());
        }
    }

    #[test]
    fn velocity_bound_reference() {
        let spec = ModelSpec::reference(6.0, 1.5);
        // M is set by the initial-data term 4 (1 + pi/2) / 6
        let m = 4.0 * (1.0 + core::f64::consts::FRAC_PI_2) / 6.0;
        let c1 = spec.velocity_bound();
        assert!((c1 - 2.0 * m * 2.0 * 6.0).abs() < 1e-2, "{c1}");
    }
}
