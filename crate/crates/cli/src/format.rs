//! The JSON symbol file: a polynomial symbol `a`, its base point, an optional
//! normal-form presentation, a sampling region and run options.
//!
//! Coefficients are exact rationals written as strings (`"3"`, `"-1/2"`).
//! Exponents are maps keyed by variable name (`t`, `x1`, `tau`, `xi1`, ...);
//! zero exponents are omitted. Terms are written in graded-lexicographic
//! order, so serializing a parsed canonical file reproduces it byte for byte.

use std::collections::BTreeMap;
use std::fmt;

use hypcert_core::symbolic::{parse_rational, PhasePoint, PolySymbol, Rational, Var};
use hypcert_core::verifier::Region;
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormatError {
    /// Malformed JSON, anchored at a line and column.
    Parse { line: usize, column: usize, message: String },
    Schema { path: String, message: String },
    Dimension { path: String, message: String },
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormatError::Parse { line, column, message } => {
                write!(f, "parse error at line {line}, column {column}: {message}")
            }
            FormatError::Schema { path, message } => write!(f, "schema error at {path}: {message}"),
            FormatError::Dimension { path, message } => {
                write!(f, "dimension error at {path}: {message}")
            }
        }
    }
}

impl std::error::Error for FormatError {}

fn schema(path: impl Into<String>, message: impl Into<String>) -> FormatError {
    FormatError::Schema {
        path: path.into(),
        message: message.into(),
    }
}

fn dimension(path: impl Into<String>, message: impl Into<String>) -> FormatError {
    FormatError::Dimension {
        path: path.into(),
        message: message.into(),
    }
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        let message = e.to_string();
        // serde_json appends " at line L column C"; keep only the message
        let message = match message.rfind(" at line ") {
            Some(k) => message[..k].to_string(),
            None => message,
        };
        FormatError::Parse {
            line: e.line(),
            column: e.column(),
            message,
        }
    }
}

/// One `coeff * monomial` term as written in the file.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTerm {
    pub coeff: String,
    #[serde(default)]
    pub exp: BTreeMap<String, u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPoint {
    pub t: String,
    pub x: Vec<String>,
    pub tau: String,
    pub xi: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawNormalForm {
    pub form: String,
    pub p: usize,
    pub q: Vec<Vec<RawTerm>>,
    #[serde(default)]
    pub r: Vec<Vec<RawTerm>>,
    #[serde(default)]
    pub phi: Option<Vec<RawTerm>>,
    #[serde(default)]
    pub psi: Option<Vec<RawTerm>>,
    #[serde(default)]
    pub g: Option<Vec<RawTerm>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    pub t_max: f64,
    pub x_half: f64,
    pub xi_half: f64,
    pub points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_den: Option<f64>,
}

impl Default for RegionSpec {
    fn default() -> Self {
        let r = Region::default();
        RegionSpec {
            t_max: r.t_max,
            x_half: r.x_half,
            xi_half: r.xi_half,
            points: r.t_points,
            eta_den: None,
        }
    }
}

impl RegionSpec {
    pub fn region(&self) -> Region {
        Region {
            eta_den: self.eta_den,
            ..Region::new(self.t_max, self.x_half, self.xi_half, self.points)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// Exact rational, e.g. `"1/100"`.
    #[serde(default = "default_slack")]
    pub slack: String,
    /// Spectral tolerance; `None` uses `1e-9 (1 + |F|)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default = "default_structural_points")]
    pub structural_points: usize,
}

fn default_slack() -> String {
    "1/100".into()
}

fn default_structural_points() -> usize {
    9
}

impl Default for Options {
    fn default() -> Self {
        Options {
            slack: default_slack(),
            tol: None,
            structural_points: default_structural_points(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    schema_version: u32,
    dim: usize,
    base_point: RawPoint,
    symbol: Vec<RawTerm>,
    #[serde(default)]
    normal_form: Option<RawNormalForm>,
    #[serde(default)]
    region: Option<RegionSpec>,
    #[serde(default)]
    options: Option<Options>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalFormData {
    Form1 {
        p: usize,
        q: Vec<PolySymbol>,
        r: Vec<PolySymbol>,
        phi: PolySymbol,
        psi: PolySymbol,
    },
    Form2 {
        p: usize,
        q: Vec<PolySymbol>,
        r: Vec<PolySymbol>,
        g: PolySymbol,
    },
}

/// A validated symbol file. `symbol` is `a`; the full symbol is `-tau^2 + a`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolFile {
    pub dim: usize,
    pub base_point: PhasePoint,
    pub symbol: PolySymbol,
    pub normal_form: Option<NormalFormData>,
    pub region: RegionSpec,
    pub options: Options,
}

pub fn parse_terms(dim: usize, terms: &[RawTerm], path: &str) -> Result<PolySymbol, FormatError> {
    let n = 2 * (dim + 1);
    let mut out = Vec::with_capacity(terms.len());
    for (k, t) in terms.iter().enumerate() {
        let here = format!("{path}[{k}]");
        let c = parse_rational(&t.coeff).map_err(|e| schema(format!("{here}.coeff"), e.to_string()))?;
        let mut e = vec![0u32; n];
        for (name, &pow) in &t.exp {
            let v: Var = name
                .parse()
                .map_err(|_| schema(format!("{here}.exp"), format!("unknown variable `{name}`")))?;
            let v = v.check(dim).map_err(|_| {
                dimension(format!("{here}.exp"), format!("`{name}` is out of range for dim = {dim}"))
            })?;
            e[v.index(dim)] = pow;
        }
        out.push((e, c));
    }
    PolySymbol::from_terms(dim, out).map_err(|e| schema(path, e.to_string()))
}

fn parse_rat(s: &str, path: &str) -> Result<Rational, FormatError> {
    parse_rational(s).map_err(|e| schema(path, e.to_string()))
}

pub(crate) fn parse_point(dim: usize, p: &RawPoint) -> Result<PhasePoint, FormatError> {
    for (name, v) in [("x", &p.x), ("xi", &p.xi)] {
        if v.len() != dim {
            return Err(dimension(
                format!("base_point.{name}"),
                format!("has {} entries, dim = {dim}", v.len()),
            ));
        }
    }
    let list = |v: &[String], name: &str| -> Result<Vec<Rational>, FormatError> {
        v.iter()
            .enumerate()
            .map(|(k, s)| parse_rat(s, &format!("base_point.{name}[{k}]")))
            .collect()
    };
    PhasePoint::new(
        parse_rat(&p.t, "base_point.t")?,
        list(&p.x, "x")?,
        parse_rat(&p.tau, "base_point.tau")?,
        list(&p.xi, "xi")?,
    )
    .map_err(|e| dimension("base_point", e.to_string()))
}

fn parse_normal_form(dim: usize, nf: &RawNormalForm) -> Result<NormalFormData, FormatError> {
    let list = |v: &[Vec<RawTerm>], name: &str| -> Result<Vec<PolySymbol>, FormatError> {
        v.iter()
            .enumerate()
            .map(|(k, t)| parse_terms(dim, t, &format!("normal_form.{name}[{k}]")))
            .collect()
    };
    let one = |v: &Option<Vec<RawTerm>>, name: &str| -> Result<PolySymbol, FormatError> {
        match v {
            Some(t) => parse_terms(dim, t, &format!("normal_form.{name}")),
            None => Err(schema("normal_form", format!("`{}` requires `{name}`", nf.form))),
        }
    };
    let absent = |v: &Option<Vec<RawTerm>>, name: &str| -> Result<(), FormatError> {
        match v {
            Some(_) => Err(schema(format!("normal_form.{name}"), format!("not allowed in {}", nf.form))),
            None => Ok(()),
        }
    };
    let q = list(&nf.q, "q")?;
    let r = list(&nf.r, "r")?;
    match nf.form.as_str() {
        "form1" => {
            absent(&nf.g, "g")?;
            Ok(NormalFormData::Form1 {
                p: nf.p,
                q,
                r,
                phi: one(&nf.phi, "phi")?,
                psi: one(&nf.psi, "psi")?,
            })
        }
        "form2" => {
            absent(&nf.phi, "phi")?;
            absent(&nf.psi, "psi")?;
            Ok(NormalFormData::Form2 {
                p: nf.p,
                q,
                r,
                g: one(&nf.g, "g")?,
            })
        }
        other => Err(schema("normal_form.form", format!("`{other}` is not `form1` or `form2`"))),
    }
}

pub fn parse_symbol_str(text: &str) -> Result<SymbolFile, FormatError> {
    let raw: RawFile = serde_json::from_str(text)?;
    if raw.schema_version != SCHEMA_VERSION {
        return Err(schema(
            "schema_version",
            format!("unsupported version {} (expected {SCHEMA_VERSION})", raw.schema_version),
        ));
    }
    if raw.dim == 0 {
        return Err(dimension("dim", "must be positive"));
    }
    if raw.symbol.is_empty() {
        return Err(schema("symbol", "term list is empty; a must be nonzero"));
    }
    let symbol = parse_terms(raw.dim, &raw.symbol, "symbol")?;
    if symbol.is_zero() {
        return Err(schema("symbol", "terms cancel; a must be nonzero"));
    }
    if symbol.depends_on(Var::Tau) {
        return Err(schema("symbol", "a must not depend on tau"));
    }
    let base_point = parse_point(raw.dim, &raw.base_point)?;
    let normal_form = raw
        .normal_form
        .as_ref()
        .map(|nf| parse_normal_form(raw.dim, nf))
        .transpose()?;
    let options = raw.options.unwrap_or_default();
    parse_rat(&options.slack, "options.slack")?;
    Ok(SymbolFile {
        dim: raw.dim,
        base_point,
        symbol,
        normal_form,
        region: raw.region.unwrap_or_default(),
        options,
    })
}

pub fn parse_symbol_file(path: &std::path::Path) -> Result<SymbolFile, crate::CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| crate::CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(parse_symbol_str(&text)?)
}

/// Canonical term list of a polynomial.
pub struct Terms<'a>(pub &'a PolySymbol);

struct Exponents<'a> {
    dim: usize,
    exps: &'a [u32],
}

impl Serialize for Exponents<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let nz = self.exps.iter().filter(|e| **e > 0).count();
        let mut m = s.serialize_map(Some(nz))?;
        for (k, &e) in self.exps.iter().enumerate() {
            if e > 0 {
                m.serialize_entry(&Var::from_index(k, self.dim).to_string(), &e)?;
            }
        }
        m.end()
    }
}

#[derive(Serialize)]
struct TermOut<'a> {
    coeff: String,
    exp: Exponents<'a>,
}

impl Serialize for Terms<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let dim = self.0.dim();
        s.collect_seq(self.0.terms().map(|(e, c)| TermOut {
            coeff: c.to_string(),
            exp: Exponents { dim, exps: e },
        }))
    }
}

struct PointOut<'a>(&'a PhasePoint);

impl Serialize for PointOut<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let p = self.0;
        let mut m = s.serialize_map(Some(4))?;
        m.serialize_entry("t", &p.t.to_string())?;
        m.serialize_entry("x", &p.x.iter().map(|v| v.to_string()).collect::<Vec<_>>())?;
        m.serialize_entry("tau", &p.tau.to_string())?;
        m.serialize_entry("xi", &p.xi.iter().map(|v| v.to_string()).collect::<Vec<_>>())?;
        m.end()
    }
}

struct NormalFormOut<'a>(&'a NormalFormData);

fn term_lists(v: &[PolySymbol]) -> Vec<Terms<'_>> {
    v.iter().map(Terms).collect()
}

impl Serialize for NormalFormOut<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        match self.0 {
            NormalFormData::Form1 { p, q, r, phi, psi } => {
                m.serialize_entry("form", "form1")?;
                m.serialize_entry("p", p)?;
                m.serialize_entry("q", &term_lists(q))?;
                m.serialize_entry("r", &term_lists(r))?;
                m.serialize_entry("phi", &Terms(phi))?;
                m.serialize_entry("psi", &Terms(psi))?;
            }
            NormalFormData::Form2 { p, q, r, g } => {
                m.serialize_entry("form", "form2")?;
                m.serialize_entry("p", p)?;
                m.serialize_entry("q", &term_lists(q))?;
                m.serialize_entry("r", &term_lists(r))?;
                m.serialize_entry("g", &Terms(g))?;
            }
        }
        m.end()
    }
}

impl Serialize for SymbolFile {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("schema_version", &SCHEMA_VERSION)?;
        m.serialize_entry("dim", &self.dim)?;
        m.serialize_entry("base_point", &PointOut(&self.base_point))?;
        m.serialize_entry("symbol", &Terms(&self.symbol))?;
        if let Some(nf) = &self.normal_form {
            m.serialize_entry("normal_form", &NormalFormOut(nf))?;
        }
        m.serialize_entry("region", &self.region)?;
        m.serialize_entry("options", &self.options)?;
        m.end()
    }
}

/// Canonical pretty-printed JSON with a trailing newline.
pub fn to_canonical_json(file: &SymbolFile) -> String {
    let mut s = serde_json::to_string_pretty(file).expect("symbol files always serialize");
    s.push('\n');
    s
}
