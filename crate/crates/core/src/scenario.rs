//! Scenario files: what to check, on which `E` and `f`, with which grids.
//!
//! A run writes one JSON report per check and a CSV summary with the columns
//! in [`SUMMARY_HEADER`].

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::blaschke_verify::{canonical_theorem_id, verify_theorem, TheoremInput, TheoremReport, THEOREMS};
use crate::boundary_set::ArcSet;
use crate::error::{NevError, Result};
use crate::function_zoo::{AnalyticTestFunction, Factor, GrowthEnvelope};
use crate::green_verify::{
    default_u, normalization_self_test, verify_integral_estimate, zero_mass_identity, EstimateInput,
    EstimateReport, IdentityReport, ESTIMATES,
};
use crate::quadrature::{CircleGrid, DiskGrid, SGrid};
use crate::report::Status;
use crate::weight::bounds::{check_bound, BoundCheck, BoundKind, BOUNDS};
use crate::weight::WeightParams;

pub const SCHEMA_VERSION: u32 = 1;

/// Final residual accepted for the zero-mass identities.
pub const IDENTITY_TOL: f64 = 1e-3;
/// Final residual accepted for the closed-form self-test.
pub const SELF_TEST_TOL: f64 = 1e-8;

/// Green identities that can be requested by id.
pub const IDENTITIES: &[(&str, &str)] = &[
    ("self-test", "f(z) = z, g = 1−|z|²: 2π·g(0) = ∫ log|z| Δg dm + boundary terms = 2π"),
    ("eOPC3", "2π Σ_{|a|<s} g_s(a/s) = ∫_D Δg_s log|f_s| dm for p > 0 (boundary terms vanish)"),
    ("eP3", "2π Σ_{|a|<s} g_s(a/s) = ∫_D Δg_s log|f_s| dm − 2∫_T φ(se^{iθ}) log|f_s| dθ for p = 0"),
];

/// The boundary set, by construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    /// Gaps as `[start, end]` angle pairs.
    Gaps { gaps: Vec<[f64; 2]> },
    Points { angles: Vec<f64> },
    /// The closed arc `[start, end]`.
    Arc { start: f64, end: f64 },
    /// Middle-thirds Cantor set on `[start, end]`.
    Cantor { start: f64, end: f64, depth: u32 },
    FullCircle,
}

impl SetSpec {
    pub fn build(&self) -> Result<ArcSet> {
        match self {
            SetSpec::Gaps { gaps } => ArcSet::new(&gaps.iter().map(|g| (g[0], g[1])).collect::<Vec<_>>()),
            SetSpec::Points { angles } => ArcSet::points(angles),
            SetSpec::Arc { start, end } => ArcSet::closed_arc(*start, *end),
            SetSpec::Cantor { start, end, depth } => ArcSet::cantor(*start, *end, *depth),
            SetSpec::FullCircle => Ok(ArcSet::full_circle()),
        }
    }

    /// `α(E)` where it is known in closed form.
    pub fn exact_alpha(&self) -> Option<f64> {
        match self {
            SetSpec::Points { .. } => Some(1.0),
            SetSpec::Arc { .. } | SetSpec::FullCircle => Some(0.0),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub p: f64,
    pub q: f64,
    #[serde(default = "default_eps")]
    pub eps: f64,
    /// Growth envelope `K(1−|z|²)^{−p_env} d^{−q_env}`; the function's own
    /// envelope is used when `k` is absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_env: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_env: Option<f64>,
    /// Exact `α(E)`, overriding the closed form of the set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Start of the `s` window `1 − δ 2^{−k}`.
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_u")]
    pub u: f64,
    /// Dilation used by identities and estimates.
    #[serde(default = "default_s")]
    pub s: f64,
}

fn default_eps() -> f64 {
    0.5
}
fn default_delta() -> f64 {
    0.5
}
fn default_s() -> f64 {
    0.8
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    #[serde(default = "default_n_r")]
    pub n_r: usize,
    #[serde(default = "default_n_theta")]
    pub n_theta: usize,
    #[serde(default = "default_circle")]
    pub circle: usize,
    /// Last index `k` of the `s` window.
    #[serde(default = "default_s_points")]
    pub s_k_max: u32,
    /// Grids used by the identities, doubling from the base grid.
    #[serde(default = "default_levels")]
    pub levels: u32,
    /// Random draws per pointwise bound.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Dyadic ladder `2^{−n}`, `n_min ≤ n ≤ n_max`, for `α̂(E)`.
    #[serde(default = "default_alpha_window")]
    pub alpha_window: (i32, i32),
}

fn default_n_r() -> usize {
    64
}
fn default_n_theta() -> usize {
    128
}
fn default_circle() -> usize {
    256
}
fn default_s_points() -> u32 {
    3
}
fn default_levels() -> u32 {
    3
}
fn default_samples() -> usize {
    10_000
}
fn default_alpha_window() -> (i32, i32) {
    (3, 12)
}

impl Default for Grids {
    fn default() -> Self {
        Grids {
            n_r: default_n_r(),
            n_theta: default_n_theta(),
            circle: default_circle(),
            s_k_max: default_s_points(),
            levels: default_levels(),
            samples: default_samples(),
            alpha_window: default_alpha_window(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    pub set: SetSpec,
    pub function: Factor,
    pub params: Params,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default)]
    pub seed: u64,
    pub checks: Vec<String>,
}

/// Which registry a check id belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Bound,
    Identity,
    Estimate,
    Theorem,
}

impl CheckKind {
    pub fn of(id: &str) -> Option<CheckKind> {
        if BOUNDS.iter().any(|b| b.id == id) {
            Some(CheckKind::Bound)
        } else if IDENTITIES.iter().any(|i| i.0 == id) {
            Some(CheckKind::Identity)
        } else if ESTIMATES.iter().any(|e| e.0 == id) {
            Some(CheckKind::Estimate)
        } else if canonical_theorem_id(id).is_some() {
            Some(CheckKind::Theorem)
        } else {
            None
        }
    }

    fn label(self) -> &'static str {
        match self {
            CheckKind::Bound => "bound",
            CheckKind::Identity => "identity",
            CheckKind::Estimate => "estimate",
            CheckKind::Theorem => "theorem",
        }
    }
}

/// Every registered id with its kind and the statement it checks.
pub fn registry() -> Vec<(CheckKind, &'static str, String)> {
    let mut out = Vec::new();
    for b in BOUNDS {
        let tag = match b.kind {
            BoundKind::Exact => "",
            BoundKind::UpToConstant => " [up to a constant]",
        };
        out.push((CheckKind::Bound, b.id, format!("{}{tag}", b.statement)));
    }
    for (id, s) in IDENTITIES {
        out.push((CheckKind::Identity, *id, s.to_string()));
    }
    for (id, s) in ESTIMATES {
        out.push((CheckKind::Estimate, *id, s.to_string()));
    }
    for (id, s) in THEOREMS {
        out.push((CheckKind::Theorem, *id, s.to_string()));
    }
    out
}

/// The registry as an aligned text table.
pub fn registry_table() -> String {
    let mut s = String::new();
    for (kind, id, anchor) in registry() {
        let _ = writeln!(s, "{:<9} {:<11} {}", kind.label(), id, anchor);
    }
    s
}

impl Scenario {
    /// Parses and validates; serde errors keep their line and column.
    pub fn from_json(text: &str) -> Result<Scenario> {
        let sc: Scenario = serde_json::from_str(text)?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(NevError::InvalidInput(format!(
                "schema_version {} not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        for id in &self.checks {
            if CheckKind::of(id).is_none() {
                return Err(NevError::UnknownId(id.clone()));
            }
        }
        self.set.build()?;
        self.weight_params()?;
        self.disk_grid()?;
        CircleGrid::new(self.grids.circle)?;
        if self.grids.levels == 0 || self.grids.levels > 6 {
            return Err(NevError::InvalidInput(format!("levels = {} not in 1..=6", self.grids.levels)));
        }
        let (a, b) = self.grids.alpha_window;
        if a >= b {
            return Err(NevError::InvalidInput("alpha_window needs n_min < n_max".into()));
        }
        self.s_grid().validate()?;
        Ok(())
    }

    fn weight_params(&self) -> Result<WeightParams> {
        WeightParams::with_q(self.params.p, self.params.q)
    }

    fn disk_grid(&self) -> Result<DiskGrid> {
        DiskGrid::new(self.grids.n_r, self.grids.n_theta)
    }

    fn s_grid(&self) -> SGrid {
        SGrid { delta: self.params.delta, k_max: self.grids.s_k_max }
    }

    /// The scenario with grids doubled `k` times and `k` more `s` points.
    pub fn refined(&self, k: u32) -> Scenario {
        let mut sc = self.clone();
        sc.grids.n_r <<= k;
        sc.grids.n_theta <<= k;
        sc.grids.circle <<= k;
        sc.grids.s_k_max += k;
        sc
    }
}

/// Report of one check, tagged by registry.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CheckReport {
    Bound(BoundCheck),
    Identity(IdentityReport),
    Estimate(EstimateReport),
    Theorem(TheoremReport),
}

/// Outcome of one check, as it appears in the summary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub check_id: String,
    pub kind: CheckKind,
    pub status: Status,
    /// Why the check could not run, when it could not.
    pub error: Option<String>,
    pub report: Option<CheckReport>,
}

pub const SUMMARY_HEADER: &str =
    "scenario,check_id,kind,status,lhs,rhs,constant,drift,residual,violations,samples";

fn num(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_nan() => String::new(),
        Some(v) => format!("{v:.12e}"),
        None => String::new(),
    }
}

impl CheckOutcome {
    pub fn csv_row(&self, scenario: &str) -> String {
        let (mut lhs, mut rhs, mut constant, mut drift, mut residual) = (None, None, None, None, None);
        let (mut violations, mut samples) = (String::new(), String::new());
        match &self.report {
            Some(CheckReport::Bound(b)) => {
                violations = b.violations.to_string();
                samples = b.samples.to_string();
                constant = Some(b.worst_margin);
                drift = b.drift;
            }
            Some(CheckReport::Identity(r)) => {
                lhs = Some(r.lhs);
                rhs = Some(r.rhs);
                residual = Some(r.residual);
            }
            Some(CheckReport::Estimate(r)) => {
                lhs = Some(r.lhs);
                rhs = Some(r.rhs);
                constant = Some(r.constant);
                drift = Some(r.drift);
                residual = r.coefficient_residual;
            }
            Some(CheckReport::Theorem(r)) => {
                lhs = Some(r.lhs);
                rhs = Some(r.rhs);
                constant = Some(r.constant);
                drift = Some(r.drift);
            }
            None => {}
        }
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            csv_field(scenario),
            self.check_id,
            self.kind.label(),
            self.status,
            num(lhs),
            num(rhs),
            num(constant),
            num(drift),
            num(residual),
            violations,
            samples
        )
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Results of a whole scenario.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub scenario: String,
    pub outcomes: Vec<CheckOutcome>,
}

impl RunSummary {
    /// Worst status over all checks; `Pass` when there are none.
    pub fn status(&self) -> Status {
        self.outcomes.iter().fold(Status::Pass, |s, o| s.and(o.status))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(SUMMARY_HEADER);
        s.push('\n');
        for o in &self.outcomes {
            s.push_str(&o.csv_row(&self.scenario));
            s.push('\n');
        }
        s
    }

    /// `0` all pass, `2` some inconclusive, `1` any failure.
    pub fn exit_code(&self) -> i32 {
        match self.status() {
            Status::Pass => 0,
            Status::Inconclusive => 2,
            Status::Fail => 1,
        }
    }
}

/// Runs every check of a validated scenario.
pub fn run_scenario(sc: &Scenario) -> Result<RunSummary> {
    sc.validate()?;
    let e = sc.set.build()?;
    let f = AnalyticTestFunction::new(sc.function.clone())
        .or_else(|_| AnalyticTestFunction::unnormalized(sc.function.clone()))?;
    let params = sc.weight_params()?;
    let grid = sc.disk_grid()?;
    let circle = CircleGrid::new(sc.grids.circle)?;
    let outcomes = sc
        .checks
        .iter()
        .map(|id| {
            let kind = CheckKind::of(id).expect("validated");
            let res = match kind {
                CheckKind::Bound => check_bound(id, &e, &params, sc.grids.samples, sc.seed).map(|b| {
                    let st = if b.passed {
                        Status::Pass
                    } else if b.kind == BoundKind::Exact {
                        Status::Fail
                    } else {
                        Status::Inconclusive
                    };
                    (st, CheckReport::Bound(b))
                }),
                CheckKind::Identity => run_identity(id, sc, &f, &e, &params, &grid),
                CheckKind::Estimate => {
                    let inp = EstimateInput { f: &f, e: &e, params, s: sc.params.s, u: sc.params.u, grid };
                    verify_integral_estimate(id, &inp).map(|r| (r.status, CheckReport::Estimate(r)))
                }
                CheckKind::Theorem => {
                    let envelope = sc.params.k.map(|k| GrowthEnvelope {
                        k,
                        p: sc.params.p_env.unwrap_or(0.0),
                        q: sc.params.q_env.unwrap_or(sc.params.q),
                        e: e.clone(),
                    });
                    let inp = TheoremInput {
                        f: &f,
                        e: &e,
                        params,
                        eps: sc.params.eps,
                        envelope,
                        alpha: sc.params.alpha.or_else(|| sc.set.exact_alpha()),
                        alpha_window: sc.grids.alpha_window,
                        s_grid: sc.s_grid(),
                        grid,
                        circle,
                    };
                    verify_theorem(id, &inp).map(|r| (r.status, CheckReport::Theorem(r)))
                }
            };
            match res {
                Ok((status, report)) => CheckOutcome { check_id: id.clone(), kind, status, error: None, report: Some(report) },
                Err(err) => CheckOutcome {
                    check_id: id.clone(),
                    kind,
                    status: Status::Fail,
                    error: Some(err.to_string()),
                    report: None,
                },
            }
        })
        .collect();
    Ok(RunSummary { scenario: sc.name.clone(), outcomes })
}

fn run_identity(
    id: &str,
    sc: &Scenario,
    f: &AnalyticTestFunction,
    e: &ArcSet,
    params: &WeightParams,
    grid: &DiskGrid,
) -> Result<(Status, CheckReport)> {
    let (r, tol) = match id {
        "self-test" => (normalization_self_test(grid, sc.grids.levels)?, SELF_TEST_TOL),
        _ => {
            let want_pos = id == "eOPC3";
            if want_pos != (params.p > 0.0) {
                return Err(NevError::Rejected(format!(
                    "{id} requires {}",
                    if want_pos { "p > 0" } else { "p = 0" }
                )));
            }
            (zero_mass_identity(f, e, params, sc.params.s, grid, sc.grids.levels)?, IDENTITY_TOL)
        }
    };
    let st = if r.residual < tol && r.converged { Status::Pass } else { Status::Inconclusive };
    Ok((st, CheckReport::Identity(r)))
}

fn file_stem(i: usize, id: &str) -> String {
    let safe: String = id
        .replace('∞', "inf")
        .replace('>', "gt")
        .replace('=', "eq")
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    format!("{i:02}_{safe}")
}

/// Writes `summary.csv` and one JSON report per check into `out`.
pub fn write_outputs(summary: &RunSummary, out: &Path) -> Result<()> {
    fs::create_dir_all(out)?;
    for (i, o) in summary.outcomes.iter().enumerate() {
        let json = serde_json::to_string_pretty(o)?;
        fs::write(out.join(format!("{}.json", file_stem(i, &o.check_id))), json + "\n")?;
    }
    fs::write(out.join("summary.csv"), summary.to_csv())?;
    Ok(())
}
