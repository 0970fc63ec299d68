//! CSV and JSON artifacts plus the run manifest.
//!
//! Floats are written with 17 significant digits so values round-trip.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use sisfront_core::dynamics::{Certificate, Outcome, ProbeRecord, ThresholdResult};
use sisfront_core::frontfix::{Snapshot, Trajectory};
use sisfront_core::semiwave::SemiWaveResult;
use sisfront_core::spectral::ProbeReport;
use sisfront_core::steady::EquilibriumProfile;

use crate::error::CliError;

/// 17 significant digits in scientific notation.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Artifact {
    pub file: String,
    pub kind: String,
    pub config_sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub artifacts: Vec<Artifact>,
}

/// Output directory that records every file written into it.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    artifacts: Vec<Artifact>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(OutputDir {
            root: root.to_path_buf(),
            artifacts: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn artifacts(&self) -> &[Artifact] {
        &self.artifacts
    }

    fn write(&mut self, name: &str, kind: &str, config_hash: &str, body: &str) -> Result<(), CliError> {
        let path = self.root.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
        fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
        self.artifacts.push(Artifact {
            file: name.to_string(),
            kind: kind.to_string(),
            config_sha256: config_hash.to_string(),
        });
        Ok(())
    }

    pub fn csv(&mut self, name: &str, kind: &str, config_hash: &str, table: &Table) -> Result<(), CliError> {
        self.write(name, kind, config_hash, &table.text)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, kind: &str, config_hash: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Numeric(e.to_string()))?;
        text.push('\n');
        self.write(name, kind, config_hash, &text)
    }

    /// Writes `manifest.json` listing every artifact.
    pub fn finish(self, command: &str) -> Result<PathBuf, CliError> {
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            artifacts: self.artifacts,
        };
        let path = self.root.join("manifest.json");
        let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Numeric(e.to_string()))?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}

/// A CSV table under construction.
#[derive(Debug, Clone)]
pub struct Table {
    text: String,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Table { text }
    }

    pub fn row<I, S>(&mut self, cells: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut first = true;
        for c in cells {
            if !first {
                self.text.push(',');
            }
            self.text.push_str(c.as_ref());
            first = false;
        }
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

/// `t,g,h,gdot,hdot,supI,R0F`; `R0F` is blank where it was not sampled.
pub fn fronts_table(trajectory: &Trajectory) -> Table {
    let mut table = Table::new(&["t", "g", "h", "gdot", "hdot", "supI", "R0F"]);
    let mut samples = trajectory.r0f_history.iter().peekable();
    for r in &trajectory.front_history {
        while samples.peek().is_some_and(|s| s.0 < r.t) {
            samples.next();
        }
        let r0 = match samples.peek() {
            Some(s) if s.0 == r.t => num(s.1),
            _ => String::new(),
        };
        table.row([
            num(r.t),
            num(r.g),
            num(r.h),
            num(r.g_dot),
            num(r.h_dot),
            num(r.sup_i),
            r0,
        ]);
    }
    table
}

/// `x,I` including the zero values at both fronts.
pub fn profile_table(snapshot: &Snapshot) -> Table {
    let mut table = Table::new(&["x", "I"]);
    for (x, v) in snapshot.profile() {
        table.row([num(x), num(v)]);
    }
    table
}

pub fn profile_name(snapshot: &Snapshot) -> String {
    format!("profile_{:.4}.csv", snapshot.front.t)
}

/// `t,g,h,R0F` at the sampled times.
pub fn r0_series_table(trajectory: &Trajectory) -> Table {
    let mut table = Table::new(&["t", "g", "h", "R0F"]);
    let mut history = trajectory.front_history.iter().peekable();
    for &(t, r0) in &trajectory.r0f_history {
        while history.peek().is_some_and(|r| r.t < t) {
            history.next();
        }
        let (g, h) = history.peek().map_or((f64::NAN, f64::NAN), |r| (r.g, r.h));
        table.row([num(t), num(g), num(h), num(r0)]);
    }
    table
}

pub fn r0_probe_table(report: &ProbeReport) -> Table {
    let mut table = Table::new(&["parameter", "value", "R0"]);
    for row in &report.rows {
        table.row([row.parameter.to_string(), num(row.value), num(row.r0)]);
    }
    table
}

pub fn semiwave_table(results: &[SemiWaveResult]) -> Table {
    let mut table = Table::new(&["direction", "k_star", "slope0"]);
    for r in results {
        table.row([r.direction.as_str().to_string(), num(r.k_star), num(r.slope0)]);
    }
    table
}

pub fn semiwave_profile_table(result: &SemiWaveResult) -> Table {
    let mut table = Table::new(&["z", "q"]);
    for &(z, q) in &result.profile {
        table.row([num(z), num(q)]);
    }
    table
}

pub fn equilibrium_table(profile: &EquilibriumProfile) -> Table {
    let mut table = Table::new(&["x", "Istar"]);
    for &(x, v) in &profile.samples {
        table.row([num(x), num(v)]);
    }
    table
}

pub fn mu_scan_table(probes: &[ProbeRecord]) -> Table {
    let mut table = Table::new(&["mu", "verdict", "t0_or_blank"]);
    let mut sorted: Vec<&ProbeRecord> = probes.iter().collect();
    sorted.sort_by(|a, b| a.mu.total_cmp(&b.mu));
    for p in sorted {
        table.row([
            num(p.mu),
            p.verdict.as_str().to_string(),
            p.t0.map(num).unwrap_or_default(),
        ]);
    }
    table
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertificateReport {
    Spreading {
        t0: f64,
        r0: f64,
        g: f64,
        h: f64,
    },
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

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub accepted_steps: usize,
    pub halvings: usize,
    pub clipped_steps: usize,
    pub peclet_warnings: usize,
    pub bound_violations: usize,
    pub monotonicity_violations: usize,
    pub max_speed: f64,
    pub velocity_bound: f64,
    pub min_value: f64,
    pub max_value: f64,
    pub stopped_early: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictReport {
    pub verdict: &'static str,
    pub certificate: CertificateReport,
    pub final_sup: f64,
    pub final_g: f64,
    pub final_h: f64,
    pub horizon: f64,
    pub max_r0f: Option<f64>,
    pub run: RunReport,
}

impl VerdictReport {
    pub fn new(outcome: &Outcome, trajectory: &Trajectory) -> Self {
        let certificate = match &outcome.certificate {
            Certificate::Spreading { t0, r0, interval } => CertificateReport::Spreading {
                t0: *t0,
                r0: *r0,
                g: interval.0,
                h: interval.1,
            },
            Certificate::Vanishing {
                window_start,
                left_advance,
                right_advance,
                front_tolerance,
                max_sup,
                mass_tolerance,
                terminal_r0,
            } => CertificateReport::Vanishing {
                window_start: *window_start,
                left_advance: *left_advance,
                right_advance: *right_advance,
                front_tolerance: *front_tolerance,
                max_sup: *max_sup,
                mass_tolerance: *mass_tolerance,
                terminal_r0: *terminal_r0,
            },
            Certificate::None { reason } => CertificateReport::None { reason: reason.clone() },
        };
        let d = &trajectory.diagnostics;
        VerdictReport {
            verdict: outcome.verdict.as_str(),
            certificate,
            final_sup: outcome.diagnostics.final_sup,
            final_g: outcome.diagnostics.final_front.g,
            final_h: outcome.diagnostics.final_front.h,
            horizon: outcome.diagnostics.horizon,
            max_r0f: outcome.diagnostics.max_r0f,
            run: RunReport {
                accepted_steps: d.accepted_steps,
                halvings: d.halvings,
                clipped_steps: d.clipped_steps,
                peclet_warnings: d.peclet_warnings,
                bound_violations: d.bound_violations,
                monotonicity_violations: d.monotonicity_violations,
                max_speed: d.max_speed,
                velocity_bound: d.velocity_bound,
                min_value: d.min_value,
                max_value: d.max_value,
                stopped_early: d.stopped_early,
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdReport {
    pub mu_star: f64,
    pub mu_lo: f64,
    pub mu_hi: f64,
    pub spreads_for_all_mu: bool,
    pub probes: usize,
}

impl From<&ThresholdResult> for ThresholdReport {
    fn from(r: &ThresholdResult) -> Self {
        ThresholdReport {
            mu_star: r.mu_star,
            mu_lo: r.interval.0,
            mu_hi: r.interval.1,
            spreads_for_all_mu: r.spreads_for_all_mu,
            probes: r.probes.len(),
        }
    }
}

/// One-line human summary of an outcome.
pub fn describe(outcome: &Outcome) -> String {
    let mut s = String::new();
    let _ = write!(s, "verdict: {}", outcome.verdict);
    match &outcome.certificate {
        Certificate::Spreading { t0, r0, interval } => {
            let _ = write!(s, " (R0F({t0}) = {r0:.6} on ({:.4}, {:.4}))", interval.0, interval.1);
        }
        Certificate::Vanishing {
            max_sup, terminal_r0, ..
        } => {
            let _ = write!(s, " (sup I = {max_sup:.3e}, terminal R0 = {terminal_r0:.6})");
        }
        Certificate::None { reason } => {
            let _ = write!(s, " ({reason})");
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip_with_17_digits() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 123456.789] {
            let s = num(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let mantissa = s.split('e').next().unwrap();
            assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
        }
    }

    #[test]
    fn table_rows_are_comma_separated() {
        let mut t = Table::new(&["a", "b"]);
        t.row(["1", "2"]);
        assert_eq!(t.as_str(), "a,b\n1,2\n");
    }
}
