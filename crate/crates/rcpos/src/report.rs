//! Report schema for sweeps and the verification suite.
//!
//! JSON is the interchange contract; the Markdown renderers are pure
//! functions of the same data. Reports are schema-versioned and echo their
//! full configuration, so a report file alone is enough to reproduce the
//! run. Everything except the `timing` block is deterministic for a fixed
//! config and seed, independent of the parallelism degree; comparisons use
//! [`comparable_json`], which strips that block.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bundle::BundleError;
use crate::certify::{CertifyError, HscExtremum, MinimizerReport, PositivityCertificate, Verdict};
use crate::curvature::CurvatureError;
use crate::linalg::LinalgError;
use crate::metric::MetricError;

pub const SCHEMA_VERSION: u32 = 1;

pub fn tool_version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("unknown notion '{0}' (expected rc+, rc-, griffiths, hsc)")]
    UnknownNotion(String),
    #[error("unknown output format '{0}' (expected json or markdown)")]
    UnknownFormat(String),
    #[error("report has no item with id '{0}'")]
    MissingItem(String),
    #[error("witness replay mismatch for '{id}': stored margin {stored:.12e}, recomputed {recomputed:.12e}")]
    ReplayMismatch { id: String, stored: f64, recomputed: f64 },
    #[error("reading {path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Everything a sweep needs, echoed verbatim into its report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Catalog selector (`fubini_study:2`, `product(...)`) or `.hmet` path.
    pub metric: String,
    /// Derived-bundle expression over the metric's bundle, e.g. `base`,
    /// `dual(base)`, `extpow(base, 2)`.
    pub bundle: String,
    /// Notions to certify at each point: `rc+`, `rc-`, `griffiths`, `hsc`.
    pub notions: Vec<String>,
    pub points: usize,
    pub seed: u64,
    /// Shrink factor on the domain radii when sampling, in (0, 1]; 0.9
    /// keeps points clear of the boundary.
    pub domain_margin: f64,
    /// Override for the verdict margin band; None keeps the default.
    pub tol_margin: Option<f64>,
    /// `json` or `markdown`.
    pub format: String,
    /// Worker threads for the point sweep; 0 uses the default pool. Results
    /// are bitwise independent of this value.
    pub jobs: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            metric: "fubini_study:2".into(),
            bundle: "base".into(),
            notions: vec!["rc+".into()],
            points: 20,
            seed: 1,
            domain_margin: 0.9,
            tol_margin: None,
            format: "json".into(),
            jobs: 0,
        }
    }
}

/// One certification at one point, addressable by id for `explain`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckItem {
    pub id: String,
    pub point: Vec<Complex64>,
    /// Notion flag as requested (`rc+`, ...); the certificate inside
    /// carries the long name.
    pub notion: String,
    pub certificate: PositivityCertificate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Overall {
    Certified,
    Refuted,
    Inconclusive,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Timing {
    pub total_ms: f64,
    /// Per-row wall clock for suite runs; empty for check sweeps.
    pub rows_ms: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub config: SweepConfig,
    pub items: Vec<CheckItem>,
    pub overall: Overall,
    pub timing: Timing,
}

impl CheckReport {
    /// Exit status contract: 0 all certified, 1 any refutation, 2 at least
    /// one inconclusive verdict and no refutation.
    pub fn exit_code(&self) -> i32 {
        match self.overall {
            Overall::Certified => 0,
            Overall::Refuted => 1,
            Overall::Inconclusive => 2,
        }
    }
}

/// Aggregates verdicts: any refutation dominates, then inconclusiveness.
pub fn overall_of(verdicts: impl IntoIterator<Item = Verdict>) -> Overall {
    let mut out = Overall::Certified;
    for v in verdicts {
        match v {
            Verdict::Refuted => return Overall::Refuted,
            Verdict::Inconclusive => out = Overall::Inconclusive,
            Verdict::Certified => {}
        }
    }
    out
}

/// A conclusion that failed while its row's hypothesis held, with enough
/// witness data to re-check by hand.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RowFailure {
    /// Human-readable case label, e.g. `p004 quot(base, 1)`.
    pub case: String,
    pub point: Vec<Complex64>,
    pub margin: Option<f64>,
    pub certificate: Option<PositivityCertificate>,
    pub detail: String,
}

/// One verification-suite row: a checkable statement swept over points.
///
/// `hypothesis_met` counts the cases whose hypothesis held, `gated` the
/// cases excluded by it, and `conclusion_verified` how many of the former
/// passed. A row passes when nothing that met the hypothesis failed;
/// `worst_residual` is the row's most adverse number, oriented so larger
/// is worse and 0.0 is exact.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteRow {
    pub name: String,
    pub hypothesis_met: usize,
    pub conclusion_verified: usize,
    pub gated: usize,
    pub worst_residual: f64,
    pub passed: bool,
    pub note: String,
    pub failures: Vec<RowFailure>,
}

impl SuiteRow {
    pub fn failed_cases(&self) -> usize {
        self.hypothesis_met - self.conclusion_verified
    }
}

/// Sectional-minimizer data for one point, addressable by id for `explain`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MinimizerItem {
    pub id: String,
    pub point: Vec<Complex64>,
    /// Seed the relation trials were drawn from, for exact replay.
    pub seed: u64,
    pub trials: usize,
    pub extremum: HscExtremum,
    pub relations: MinimizerReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub config: SweepConfig,
    pub rows: Vec<SuiteRow>,
    pub minimizer_items: Vec<MinimizerItem>,
    /// True iff no row has a hypothesis-met case with a failed conclusion.
    pub passed: bool,
    pub timing: Timing,
}

impl SuiteReport {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

/// Full pretty JSON, timing included.
pub fn render_json<T: Serialize>(report: &T) -> Result<String, ReportError> {
    Ok(serde_json::to_string_pretty(report)?)
}

/// Pretty JSON with the top-level `timing` block removed: the determinism
/// contract is byte-identity of this rendering for identical config and
/// seed.
pub fn comparable_json<T: Serialize>(report: &T) -> Result<String, ReportError> {
    let mut value = serde_json::to_value(report)?;
    if let Some(map) = value.as_object_mut() {
        map.remove("timing");
    }
    Ok(serde_json::to_string_pretty(&value)?)
}

/// [`comparable_json`] with the echoed `jobs` field zeroed as well, so two
/// runs that differ only in parallelism degree must render identically.
pub fn parallelism_invariant_json<T: Serialize>(report: &T) -> Result<String, ReportError> {
    let mut value = serde_json::to_value(report)?;
    if let Some(map) = value.as_object_mut() {
        map.remove("timing");
        if let Some(cfg) = map.get_mut("config").and_then(|c| c.as_object_mut()) {
            cfg.insert("jobs".into(), serde_json::Value::from(0));
        }
    }
    Ok(serde_json::to_string_pretty(&value)?)
}

fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::Certified => "certified",
        Verdict::Refuted => "refuted",
        Verdict::Inconclusive => "inconclusive",
    }
}

fn fmt_complex(z: &Complex64) -> String {
    format!("{:+.6}{:+.6}i", z.re, z.im)
}

fn fmt_point(z: &[Complex64]) -> String {
    let parts: Vec<String> = z.iter().map(fmt_complex).collect();
    format!("({})", parts.join(", "))
}

/// Markdown rendering of a check report; every number comes from the JSON
/// data, nothing is recomputed.
pub fn check_markdown(report: &CheckReport) -> String {
    let mut out = String::new();
    let c = &report.config;
    out.push_str(&format!(
        "# Positivity sweep: {} / {}\n\n{} points, seed {}, notions {}. Overall: **{}**.\n\n",
        c.metric,
        c.bundle,
        c.points,
        c.seed,
        c.notions.join(", "),
        match report.overall {
            Overall::Certified => "certified",
            Overall::Refuted => "refuted",
            Overall::Inconclusive => "inconclusive",
        }
    ));
    out.push_str("| id | point | notion | verdict | margin | raw | scale |\n");
    out.push_str("|---|---|---|---|---|---|---|\n");
    for item in &report.items {
        let cert = &item.certificate;
        out.push_str(&format!(
            "| {} | {} | {} | {} | {:+.3e} | {:+.3e} | {:.3e} |\n",
            item.id,
            fmt_point(&item.point),
            item.notion,
            verdict_word(cert.verdict),
            cert.margin,
            cert.raw_margin,
            cert.scale,
        ));
    }
    out.push_str(&format!("\n_total {:.1} ms_\n", report.timing.total_ms));
    out
}

/// Markdown rendering of a suite report.
pub fn suite_markdown(report: &SuiteReport) -> String {
    let mut out = String::new();
    let c = &report.config;
    out.push_str(&format!(
        "# Verification suite: {}\n\n{} points, seed {}. Result: **{}**.\n\n",
        c.metric,
        c.points,
        c.seed,
        if report.passed { "pass" } else { "fail" }
    ));
    out.push_str("| row | hypothesis met | verified | gated | worst residual | status | note |\n");
    out.push_str("|---|---|---|---|---|---|---|\n");
    for row in &report.rows {
        out.push_str(&format!(
            "| {} | {} | {} | {} | {:.3e} | {} | {} |\n",
            row.name,
            row.hypothesis_met,
            row.conclusion_verified,
            row.gated,
            row.worst_residual,
            if row.passed { "pass" } else { "FAIL" },
            row.note,
        ));
    }
    for row in &report.rows {
        for f in &row.failures {
            out.push_str(&format!(
                "\n- **{} failure** at {} ({}): {}\n",
                row.name,
                f.case,
                fmt_point(&f.point),
                f.detail
            ));
        }
    }
    out.push_str(&format!("\n_total {:.1} ms_\n", report.timing.total_ms));
    out
}
