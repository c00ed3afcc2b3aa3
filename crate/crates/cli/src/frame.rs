//! Frame files for `check-frame`: candidate coordinates `(X_j, Xi_j)`,
//! `j = first..=dim`, as term lists around a base point.

use hypcert_core::symbolic::{CandidateFrame, FrameReport};
use serde::{Deserialize, Serialize};

use crate::format::{parse_terms, FormatError, RawPoint, RawTerm, SCHEMA_VERSION};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPair {
    #[serde(rename = "X")]
    x: Vec<RawTerm>,
    #[serde(rename = "Xi")]
    xi: Vec<RawTerm>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFrame {
    schema_version: u32,
    dim: usize,
    base_point: RawPoint,
    first: usize,
    pairs: Vec<RawPair>,
}

pub fn parse_frame_str(text: &str) -> Result<CandidateFrame, FormatError> {
    let raw: RawFrame = serde_json::from_str(text)?;
    let schema = |path: &str, message: String| FormatError::Schema {
        path: path.into(),
        message,
    };
    if raw.schema_version != SCHEMA_VERSION {
        return Err(schema("schema_version", format!("unsupported version {}", raw.schema_version)));
    }
    if raw.dim == 0 {
        return Err(FormatError::Dimension {
            path: "dim".into(),
            message: "must be positive".into(),
        });
    }
    let base = crate::format::parse_point(raw.dim, &raw.base_point)?;
    let mut pairs = Vec::with_capacity(raw.pairs.len());
    for (k, p) in raw.pairs.iter().enumerate() {
        pairs.push((
            parse_terms(raw.dim, &p.x, &format!("pairs[{k}].X"))?,
            parse_terms(raw.dim, &p.xi, &format!("pairs[{k}].Xi"))?,
        ));
    }
    CandidateFrame::new(raw.first, pairs, base).map_err(|e| schema("pairs", e.to_string()))
}

#[derive(Debug, Serialize)]
pub struct FailureOut {
    pub check: String,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct FrameOut {
    pub tool: crate::report::Tool,
    pub passed: bool,
    pub checks_run: usize,
    pub failures: Vec<FailureOut>,
    /// Base point differs from `(0, 0, 0, e_d)`.
    pub custom_base: bool,
}

impl FrameOut {
    pub fn new(r: &FrameReport, custom_base: bool) -> Self {
        FrameOut {
            tool: crate::report::Tool::default(),
            passed: r.passed(),
            checks_run: r.checks_run,
            failures: r
                .failures
                .iter()
                .map(|f| FailureOut {
                    check: f.check.clone(),
                    detail: f.detail.clone(),
                })
                .collect(),
            custom_base,
        }
    }

    pub fn text(&self) -> String {
        let mut s = format!(
            "frame: {} ({} checks, {} failures)\n",
            if self.passed { "pass" } else { "FAIL" },
            self.checks_run,
            self.failures.len()
        );
        for f in &self.failures {
            s.push_str(&format!("  {}: {}\n", f.check, f.detail));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hypcert_core::symbolic::check_frame;

    const IDENTITY: &str = r#"{
      "schema_version": 1, "dim": 2,
      "base_point": {"t": "0", "x": ["0", "0"], "tau": "0", "xi": ["0", "1"]},
      "first": 1,
      "pairs": [
        {"X": [{"coeff": "1", "exp": {"x1": 1}}], "Xi": [{"coeff": "1", "exp": {"xi1": 1}}]},
        {"X": [{"coeff": "1", "exp": {"x2": 1}}], "Xi": [{"coeff": "1", "exp": {"xi2": 1}}]}
      ]
    }"#;

    #[test]
    fn identity_frame_passes() {
        let f = parse_frame_str(IDENTITY).unwrap();
        assert!(check_frame(&f).passed());
    }

    #[test]
    fn repeated_coordinate_fails() {
        let text = IDENTITY.replace(r#"{"x2": 1}"#, r#"{"x1": 1}"#);
        let f = parse_frame_str(&text).unwrap();
        assert!(!check_frame(&f).passed());
    }
}
