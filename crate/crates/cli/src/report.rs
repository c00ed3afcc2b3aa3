//! Certification reports and their JSON / text renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use hypcert_core::symbolic::Var;
use hypcert_core::verifier::GridMeta;
use serde::Serialize;

use crate::format::{Options, RegionSpec};

pub const TOOL_NAME: &str = "hypcert";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Certified,
    Failed,
    Marginal,
    NotApplicable,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Certified => "CERTIFIED",
            Status::Failed => "FAILED",
            Status::Marginal => "MARGINAL",
            Status::NotApplicable => "NOT_APPLICABLE",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Certified => 0,
            Status::Failed | Status::NotApplicable => 1,
            Status::Marginal => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

impl Default for Tool {
    fn default() -> Self {
        Tool {
            name: TOOL_NAME,
            version: TOOL_VERSION,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

/// A phase-space point keyed by variable name.
pub type NamedPoint = BTreeMap<String, f64>;

pub fn named_point(dim: usize, coords: &[f64]) -> NamedPoint {
    coords
        .iter()
        .enumerate()
        .map(|(k, v)| (Var::from_index(k, dim).to_string(), *v))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridAxis {
    pub var: String,
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridInfo {
    pub axes: Vec<GridAxis>,
    pub points: usize,
}

impl From<&GridMeta> for GridInfo {
    fn from(m: &GridMeta) -> Self {
        GridInfo {
            axes: m
                .axes
                .iter()
                .map(|(var, lo, hi, points)| GridAxis {
                    var: var.clone(),
                    lo: *lo,
                    hi: *hi,
                    points: *points,
                })
                .collect(),
            points: m.points,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularityOut {
    pub singular: bool,
    pub value: String,
    /// Nonzero first derivatives, keyed `dp/d<var>`.
    pub nonzero_derivatives: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenOut {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationOut {
    pub effective: bool,
    pub witness: Option<Complex>,
    pub spectrum_class: &'static str,
    pub eigenvalues: Vec<EigenOut>,
    pub tol: f64,
    pub marginal: bool,
    pub exact_real_pairs: usize,
    pub charpoly: String,
    pub quadratic_part: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SideCheckOut {
    pub name: String,
    pub holds: bool,
    pub value: String,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SideConditionsOut {
    pub form: &'static str,
    pub p: usize,
    pub passed: bool,
    pub checks: Vec<SideCheckOut>,
    pub sign_grid: SignGridOut,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignGridOut {
    pub half_width: f64,
    pub points_per_axis: usize,
    pub points: usize,
    pub axes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionOut {
    pub f: String,
    pub value: String,
    pub is_time_function: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimeFunctionOut {
    pub phi: String,
    pub branch: &'static str,
    pub slack: String,
    pub kappa_target: String,
    pub kappa_target_f64: f64,
    pub eps: Vec<String>,
    pub rho_weight: Option<String>,
    pub alpha: Vec<String>,
    pub h_phi_sq_a: String,
    pub condition: ConditionOut,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioOut {
    pub value: f64,
    pub witness: NamedPoint,
    pub evaluated: usize,
    pub excluded: usize,
    pub eta_den: f64,
    pub grid: GridInfo,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonnegOut {
    pub pass: bool,
    pub min_value: f64,
    pub witness: NamedPoint,
    pub scale: f64,
    pub grid: GridInfo,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OneSidedOut {
    /// `a` takes a negative value on the mirrored grid `t <= 0`.
    pub negative_for_negative_t: bool,
    pub min_value: f64,
    pub witness: NamedPoint,
    pub grid: GridInfo,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MarginOut {
    pub pass: bool,
    pub worst_margin: f64,
    pub witness: NamedPoint,
    pub samples: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchOut {
    pub value: f64,
    pub witness: NamedPoint,
    pub evaluated: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructuralOut {
    pub passed: bool,
    pub lower_bound_chain: MarginOut,
    pub t_zero_bound: MarginOut,
    pub c1: Option<BranchOut>,
    pub c_prime: Option<BranchOut>,
    pub lipschitz_c: f64,
    pub m1_min: f64,
    pub max_hessian_cond: f64,
    pub theta_samples: usize,
    pub cutoff_delta: f64,
}

/// The headline numbers of a certificate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub c_est: f64,
    pub kappa_est: f64,
    pub kappa_target: f64,
    pub nonneg_min: f64,
    pub negative_t_min: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateOut {
    pub label: &'static str,
    pub summary: Summary,
    pub c_est: RatioOut,
    pub kappa_est: RatioOut,
    pub nonneg: NonnegOut,
    pub one_sided: OneSidedOut,
    pub structural: StructuralOut,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub tool: Tool,
    pub input_sha256: String,
    pub status: Status,
    /// Last stage that ran.
    pub stage: &'static str,
    pub reason: Option<String>,
    pub dim: usize,
    pub symbol: String,
    pub region: RegionSpec,
    pub options: Options,
    pub singularity: Option<SingularityOut>,
    pub classification: Option<ClassificationOut>,
    pub side_conditions: Option<SideConditionsOut>,
    pub time_function: Option<TimeFunctionOut>,
    pub certificate: Option<CertificateOut>,
    pub marginal_flags: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Text,
}

/// Pretty JSON with keys sorted at every level and a trailing newline.
pub fn to_sorted_json<T: Serialize>(value: &T) -> String {
    // serde_json's Value map is ordered by key
    let v = serde_json::to_value(value).expect("reports serialize");
    let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
    s.push('\n');
    s
}

pub fn emit_report(report: &Report, format: OutputFormat) -> Vec<u8> {
    match format {
        OutputFormat::Json => to_sorted_json(report).into_bytes(),
        OutputFormat::Text => render_text(report).into_bytes(),
    }
}

fn fmt_point(p: &NamedPoint, dim: usize) -> String {
    let parts: Vec<String> = (0..2 * (dim + 1))
        .filter_map(|k| {
            let name = Var::from_index(k, dim).to_string();
            p.get(&name).map(|v| format!("{name}={v}"))
        })
        .collect();
    format!("({})", parts.join(", "))
}

fn grid_line(g: &GridInfo) -> String {
    let axes: Vec<String> = g
        .axes
        .iter()
        .map(|a| format!("{} in [{}, {}] x{}", a.var, a.lo, a.hi, a.points))
        .collect();
    format!("{} points; {}", g.points, axes.join("; "))
}

pub fn render_text(r: &Report) -> String {
    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(w, "{} {}", r.tool.name, r.tool.version);
    let _ = writeln!(w, "input sha256: {}", r.input_sha256);
    let _ = writeln!(w, "status: {} (stage: {})", r.status.as_str(), r.stage);
    if let Some(reason) = &r.reason {
        let _ = writeln!(w, "reason: {reason}");
    }
    let _ = writeln!(w, "symbol: a = {}  (d = {})", r.symbol, r.dim);
    if let Some(sg) = &r.singularity {
        if sg.singular {
            let _ = writeln!(w, "base point: singular");
        } else {
            let _ = writeln!(w, "base point: not singular (p = {})", sg.value);
            for (k, v) in &sg.nonzero_derivatives {
                let _ = writeln!(w, "  {k} = {v}");
            }
        }
    }
    if let Some(c) = &r.classification {
        let _ = writeln!(
            w,
            "classification: {} ({}, tol {:e})",
            if c.effective { "effectively hyperbolic" } else { "not effectively hyperbolic" },
            c.spectrum_class,
            c.tol
        );
        if let Some(wit) = c.witness {
            let _ = writeln!(w, "  witness eigenvalue: {}", wit.re);
        }
        let eig: Vec<String> = c
            .eigenvalues
            .iter()
            .map(|e| {
                let m = if e.multiplicity > 1 { format!(" (x{})", e.multiplicity) } else { String::new() };
                format!("{}{:+}i{m}", e.re, e.im)
            })
            .collect();
        let _ = writeln!(w, "  eigenvalues: {}", eig.join(", "));
        if c.marginal {
            let _ = writeln!(w, "  marginal: an eigenvalue lies within 10 tol of the real or imaginary axis");
        }
    }
    if let Some(sc) = &r.side_conditions {
        let _ = writeln!(w, "side conditions ({}, p = {}): {}", sc.form, sc.p, pass(sc.passed));
        for c in &sc.checks {
            let note = c.note.as_deref().map(|n| format!("  [{n}]")).unwrap_or_default();
            let _ = writeln!(w, "  {}: {} ({}){note}", c.name, pass(c.holds), c.value);
        }
        if sc.sign_grid.axes.is_empty() {
            let _ = writeln!(w, "  sign grid: remainder is constant, evaluated once");
        } else {
            let _ = writeln!(
                w,
                "  sign grid: {} points on {}, half width {}",
                sc.sign_grid.points,
                sc.sign_grid.axes.join(", "),
                sc.sign_grid.half_width
            );
        }
    }
    if let Some(tf) = &r.time_function {
        let _ = writeln!(w, "time function: phi = {}  (branch {})", tf.phi, tf.branch);
        let _ = writeln!(w, "  kappa target: {} = {}", tf.kappa_target, tf.kappa_target_f64);
        if let Some(rho) = &tf.rho_weight {
            let _ = writeln!(w, "  eps = [{}], rho = {rho}, alpha = [{}]", tf.eps.join(", "), tf.alpha.join(", "));
        }
        let _ = writeln!(w, "  H_phi^2 a(base) = {}", tf.h_phi_sq_a);
        let _ = writeln!(
            w,
            "  p_rho(-H_f) for f = {}: {} ({})",
            tf.condition.f,
            tf.condition.value,
            if tf.condition.is_time_function { "time function" } else { "not a time function" }
        );
    }
    if let Some(c) = &r.certificate {
        let d = r.dim;
        let _ = writeln!(w, "certificate ({} grid estimates):", c.label);
        let _ = writeln!(w, "  c_est     = {}  at {}", c.c_est.value, fmt_point(&c.c_est.witness, d));
        let _ = writeln!(w, "  kappa_est = {}  at {}", c.kappa_est.value, fmt_point(&c.kappa_est.witness, d));
        let _ = writeln!(
            w,
            "  nonnegativity on t >= 0: {} (min {} at {})",
            pass(c.nonneg.pass),
            c.nonneg.min_value,
            fmt_point(&c.nonneg.witness, d)
        );
        let _ = writeln!(
            w,
            "  t <= 0: min {} at {}{}",
            c.one_sided.min_value,
            fmt_point(&c.one_sided.witness, d),
            if c.one_sided.negative_for_negative_t { " (one-sided)" } else { "" }
        );
        let st = &c.structural;
        let _ = writeln!(w, "  structural: {}", pass(st.passed));
        let _ = writeln!(
            w,
            "    lower-bound chain worst margin {} ({} samples, {} skipped)",
            st.lower_bound_chain.worst_margin, st.lower_bound_chain.samples, st.lower_bound_chain.skipped
        );
        let _ = writeln!(w, "    t = 0 bound worst margin {}", st.t_zero_bound.worst_margin);
        if let Some(b) = &st.c1 {
            let _ = writeln!(w, "    c1 = {}", b.value);
        }
        if let Some(b) = &st.c_prime {
            let _ = writeln!(w, "    c' = {}", b.value);
        }
        let _ = writeln!(w, "    Lipschitz C = {}, min m1 = {}", st.lipschitz_c, st.m1_min);
        let _ = writeln!(w, "  grid: {}", grid_line(&c.c_est.grid));
    }
    for f in &r.marginal_flags {
        let _ = writeln!(w, "marginal: {f}");
    }
    s
}

fn pass(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}
