//! JSON run configuration. Unknown keys are rejected at every level.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sisfront_core::dynamics::{ClassifyCriteria, ProbeSettings, ThresholdSettings};
use sisfront_core::frontfix::Numerics;
use sisfront_core::semiwave::SemiWaveConfig;
use sisfront_core::spectral::SpectralConfig;
use sisfront_core::steady::SteadyConfig;
use sisfront_core::{Expr, ModelSpec};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "d_I")]
    pub d_i: f64,
    pub alpha: f64,
    pub mu: f64,
    pub n_star: f64,
    pub h0: f64,
    pub beta_expr: String,
    pub gamma_expr: String,
    pub beta_inf: f64,
    pub gamma_inf: f64,
    pub i0_expr: String,
    #[serde(default)]
    pub numerics: NumericsSection,
    #[serde(default)]
    pub spectral: SpectralSection,
    #[serde(default)]
    pub classify: ClassifySection,
    #[serde(default)]
    pub threshold: ThresholdSection,
    #[serde(default)]
    pub equilibrium: EquilibriumSection,
    #[serde(default)]
    pub semiwave: SemiwaveSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsSection {
    pub dt: f64,
    pub n: usize,
    pub t_end: f64,
    pub output_stride: usize,
    pub r0_stride: usize,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub outer_tol: f64,
    pub outer_max_iter: usize,
    pub clip_tol: f64,
    pub max_halvings: usize,
}

impl Default for NumericsSection {
    fn default() -> Self {
        let n = Numerics::default();
        NumericsSection {
            dt: n.dt,
            n: n.n,
            t_end: 20.0,
            output_stride: n.output_stride,
            r0_stride: 10,
            newton_tol: n.newton_tol,
            newton_max_iter: n.newton_max_iter,
            outer_tol: n.outer_tol,
            outer_max_iter: n.outer_max_iter,
            clip_tol: n.clip_tol,
            max_halvings: n.max_halvings,
        }
    }
}

impl NumericsSection {
    pub fn numerics(&self) -> Numerics {
        Numerics {
            dt: self.dt,
            n: self.n,
            output_stride: self.output_stride,
            newton_tol: self.newton_tol,
            newton_max_iter: self.newton_max_iter,
            outer_tol: self.outer_tol,
            outer_max_iter: self.outer_max_iter,
            clip_tol: self.clip_tol,
            max_halvings: self.max_halvings,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectralSection {
    pub cells_per_unit: f64,
    pub min_cells: usize,
    pub max_cells: usize,
    pub eigen_rtol: f64,
    pub r0_rtol: f64,
    pub max_sweeps: usize,
}

impl Default for SpectralSection {
    fn default() -> Self {
        let c = SpectralConfig::default();
        SpectralSection {
            cells_per_unit: c.cells_per_unit,
            min_cells: c.min_cells,
            max_cells: c.max_cells,
            eigen_rtol: c.eigen_rtol,
            r0_rtol: c.r0_rtol,
            max_sweeps: c.max_sweeps,
        }
    }
}

impl From<&SpectralSection> for SpectralConfig {
    fn from(s: &SpectralSection) -> Self {
        SpectralConfig {
            cells_per_unit: s.cells_per_unit,
            min_cells: s.min_cells,
            max_cells: s.max_cells,
            eigen_rtol: s.eigen_rtol,
            r0_rtol: s.r0_rtol,
            max_sweeps: s.max_sweeps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassifySection {
    pub trailing_fraction: f64,
    pub front_tolerance: f64,
    pub mass_tolerance: f64,
    pub min_horizon: f64,
}

impl Default for ClassifySection {
    fn default() -> Self {
        let c = ClassifyCriteria::default();
        ClassifySection {
            trailing_fraction: c.trailing_fraction,
            front_tolerance: c.front_tolerance,
            mass_tolerance: c.mass_tolerance,
            min_horizon: c.min_horizon,
        }
    }
}

impl From<&ClassifySection> for ClassifyCriteria {
    fn from(s: &ClassifySection) -> Self {
        ClassifyCriteria {
            trailing_fraction: s.trailing_fraction,
            front_tolerance: s.front_tolerance,
            mass_tolerance: s.mass_tolerance,
            min_horizon: s.min_horizon,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThresholdSection {
    pub bracket: [f64; 2],
    pub width: f64,
    /// Initial probe horizon; probes double it while undetermined.
    pub horizon: f64,
    pub max_horizon: f64,
    /// Concurrent probes; 0 picks the available parallelism.
    pub workers: usize,
}

impl Default for ThresholdSection {
    fn default() -> Self {
        let t = ThresholdSettings::default();
        ThresholdSection {
            bracket: [1.0, 6.0],
            width: t.width,
            horizon: t.horizon,
            max_horizon: t.max_horizon,
            workers: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EquilibriumSection {
    #[serde(rename = "L")]
    pub l: f64,
    pub cells: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// Half-width of the window used when comparing a run with the equilibrium.
    pub window: f64,
}

impl Default for EquilibriumSection {
    fn default() -> Self {
        let s = SteadyConfig::default();
        EquilibriumSection {
            l: 50.0,
            cells: 2000,
            tol: s.tol,
            max_iter: s.max_iter,
            window: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SemiwaveSection {
    pub epsilon: f64,
    pub rtol: f64,
    pub atol: f64,
    pub root_rtol: f64,
    pub bracket_margin: f64,
    pub scan_points: usize,
    pub max_steps: usize,
}

impl Default for SemiwaveSection {
    fn default() -> Self {
        let s = SemiWaveConfig::default();
        SemiwaveSection {
            epsilon: s.epsilon,
            rtol: s.rtol,
            atol: s.atol,
            root_rtol: s.root_rtol,
            bracket_margin: s.bracket_margin,
            scan_points: s.scan_points,
            max_steps: s.max_steps,
        }
    }
}

impl From<&SemiwaveSection> for SemiWaveConfig {
    fn from(s: &SemiwaveSection) -> Self {
        SemiWaveConfig {
            epsilon: s.epsilon,
            rtol: s.rtol,
            atol: s.atol,
            max_steps: s.max_steps,
            root_rtol: s.root_rtol,
            bracket_margin: s.bracket_margin,
            scan_points: s.scan_points,
        }
    }
}

fn parse_expr(field: &str, source: &str) -> Result<Expr, CliError> {
    Expr::parse(source).map_err(|e| CliError::Config(format!("{field}: {e}")))
}

fn positive(field: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "{field}: must be positive and finite, got {v}"
        )))
    }
}

impl RunConfig {
    /// The reference heterogeneous configuration with the given `mu`, `alpha`.
    pub fn reference(mu: f64, alpha: f64) -> Self {
        RunConfig {
            d_i: 4.0,
            alpha,
            mu,
            n_star: 2.0,
            h0: 1.0,
            beta_expr: "4 + 2*sin(x)/(1 + x^2)".into(),
            gamma_expr: "1 + cos(x)/(1 + x^2)".into(),
            beta_inf: 4.0,
            gamma_inf: 1.0,
            i0_expr: "cos(pi*x/2)".into(),
            numerics: NumericsSection::default(),
            spectral: SpectralSection::default(),
            classify: ClassifySection::default(),
            threshold: ThresholdSection::default(),
            equilibrium: EquilibriumSection::default(),
            semiwave: SemiwaveSection::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<(Self, Vec<u8>), CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        let text =
            std::str::from_utf8(&bytes).map_err(|e| CliError::Config(format!("{}: not UTF-8: {e}", path.display())))?;
        Ok((Self::from_json(text)?, bytes))
    }

    /// Field-level checks of everything serde cannot express.
    pub fn check(&self) -> Result<(), CliError> {
        for (name, v) in [
            ("d_I", self.d_i),
            ("mu", self.mu),
            ("n_star", self.n_star),
            ("h0", self.h0),
            ("numerics.dt", self.numerics.dt),
            ("numerics.t_end", self.numerics.t_end),
            ("numerics.newton_tol", self.numerics.newton_tol),
            ("numerics.outer_tol", self.numerics.outer_tol),
            ("numerics.clip_tol", self.numerics.clip_tol),
            ("threshold.width", self.threshold.width),
            ("threshold.horizon", self.threshold.horizon),
            ("threshold.max_horizon", self.threshold.max_horizon),
            ("equilibrium.L", self.equilibrium.l),
            ("equilibrium.window", self.equilibrium.window),
            ("spectral.cells_per_unit", self.spectral.cells_per_unit),
        ] {
            positive(name, v)?;
        }
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta_inf", self.beta_inf),
            ("gamma_inf", self.gamma_inf),
        ] {
            if !v.is_finite() {
                return Err(CliError::Config(format!("{name}: must be finite, got {v}")));
            }
        }
        for (name, v) in [
            ("numerics.output_stride", self.numerics.output_stride),
            ("numerics.r0_stride", self.numerics.r0_stride),
            ("numerics.newton_max_iter", self.numerics.newton_max_iter),
            ("numerics.outer_max_iter", self.numerics.outer_max_iter),
        ] {
            if v == 0 {
                return Err(CliError::Config(format!("{name}: must be at least 1")));
            }
        }
        self.numerics
            .numerics()
            .check()
            .map_err(|e| CliError::Config(format!("numerics: {e}")))?;
        let [lo, hi] = self.threshold.bracket;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(CliError::Config(format!(
                "threshold.bracket: need 0 < lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(())
    }

    /// Builds the model, reporting expression errors by field.
    pub fn spec(&self) -> Result<ModelSpec, CliError> {
        Ok(ModelSpec {
            d_i: self.d_i,
            alpha: self.alpha,
            mu: self.mu,
            n_star: self.n_star,
            h0: self.h0,
            beta: parse_expr("beta_expr", &self.beta_expr)?,
            gamma: parse_expr("gamma_expr", &self.gamma_expr)?,
            beta_inf: self.beta_inf,
            gamma_inf: self.gamma_inf,
            i0: parse_expr("i0_expr", &self.i0_expr)?,
        })
    }

    /// Builds and validates the model; any violation is a config error.
    pub fn valid_spec(&self) -> Result<ModelSpec, CliError> {
        let spec = self.spec()?;
        let violations = spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if violations.is_empty() {
            Ok(spec)
        } else {
            let text: Vec<String> = violations.iter().map(ToString::to_string).collect();
            Err(CliError::Config(text.join("; ")))
        }
    }

    pub fn probe_settings(&self) -> ProbeSettings {
        ProbeSettings {
            numerics: self.numerics.numerics(),
            criteria: (&self.classify).into(),
            spectral: (&self.spectral).into(),
            r0_stride: self.numerics.r0_stride,
        }
    }

    pub fn threshold_settings(&self) -> ThresholdSettings {
        ThresholdSettings {
            probe: self.probe_settings(),
            width: self.threshold.width,
            horizon: self.threshold.horizon,
            max_horizon: self.threshold.max_horizon,
        }
    }

    pub fn steady_config(&self) -> SteadyConfig {
        SteadyConfig {
            tol: self.equilibrium.tol,
            max_iter: self.equilibrium.max_iter,
            ..SteadyConfig::default()
        }
    }
}
