//! Report records and their JSON/CSV encodings.

use std::io::Write;

use freeform_core::functionals::{Hypotheses, InequalityCheck, Status};
use freeform_core::quadrature::QuadratureSpec;
use serde::{Deserialize, Serialize};

use crate::shape::ShapeSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inapplicable,
}

impl From<Status> for Verdict {
    fn from(s: Status) -> Self {
        match s {
            Status::Pass => Verdict::Pass,
            Status::Fail => Verdict::Fail,
            Status::Inapplicable => Verdict::Inapplicable,
        }
    }
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inapplicable => "inapplicable",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HypothesisRecord {
    pub ricci_min: Option<f64>,
    pub convexity_min: Option<f64>,
    pub free_boundary_pos: Option<f64>,
    pub free_boundary_angle: Option<f64>,
    pub half_ball: Option<bool>,
}

impl From<&Hypotheses> for HypothesisRecord {
    fn from(h: &Hypotheses) -> Self {
        let fin = |x: f64| x.is_finite().then_some(x);
        HypothesisRecord {
            ricci_min: fin(h.ricci_min),
            convexity_min: fin(h.convexity_min),
            free_boundary_pos: fin(h.free_boundary_pos),
            free_boundary_angle: fin(h.free_boundary_angle),
            half_ball: h.half_ball,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureRecord {
    pub order: usize,
    pub level: u32,
}

impl From<&QuadratureSpec> for QuadratureRecord {
    fn from(q: &QuadratureSpec) -> Self {
        QuadratureRecord {
            order: q.order,
            level: q.level,
        }
    }
}

/// One verdict. Inequalities read `lhs ≤ rhs`; identities compare `lhs`
/// with `rhs`; residual checks carry the residual in `lhs` and the
/// tolerance in `rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub suite: String,
    /// Which inequality or identity within the suite.
    pub check: String,
    pub shape: ShapeSpec,
    pub n: usize,
    #[serde(rename = "K")]
    pub curvature: i32,
    pub k: usize,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub ratio: Option<f64>,
    pub status: Verdict,
    pub hypotheses: HypothesisRecord,
    pub quadrature: QuadratureRecord,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl Record {
    #[allow(clippy::too_many_arguments)]
    pub fn new(suite: &str, check: &str, shape: &ShapeSpec, k: usize, lhs: f64, rhs: f64, status: Verdict, quad: &QuadratureSpec) -> Self {
        Record {
            suite: suite.into(),
            check: check.into(),
            shape: shape.clone(),
            n: shape.dim(),
            curvature: shape.curvature,
            k,
            lhs: finite(lhs),
            rhs: finite(rhs),
            ratio: if rhs > 0.0 { finite(lhs / rhs) } else { None },
            status,
            hypotheses: HypothesisRecord::default(),
            quadrature: quad.into(),
        }
    }

    pub fn from_check(suite: &str, shape: &ShapeSpec, c: &InequalityCheck, quad: &QuadratureSpec) -> Self {
        let mut r = Record::new(suite, &c.name, shape, c.k, c.lhs, c.rhs, c.status.into(), quad);
        r.ratio = defined_ratio(c, shape.dim());
        r.hypotheses = (&c.hypotheses).into();
        r
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub pass: usize,
    pub fail: usize,
    pub inapplicable: usize,
}

impl Counts {
    fn add(&mut self, v: Verdict) {
        match v {
            Verdict::Pass => self.pass += 1,
            Verdict::Fail => self.fail += 1,
            Verdict::Inapplicable => self.inapplicable += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.pass + self.fail + self.inapplicable
    }
}

/// A shape fails when any of its records fails, is inapplicable when all
/// of them are, and passes otherwise.
pub fn shape_verdict(records: &[Record]) -> Verdict {
    if records.iter().any(|r| r.status == Verdict::Fail) {
        Verdict::Fail
    } else if records.iter().all(|r| r.status == Verdict::Inapplicable) {
        Verdict::Inapplicable
    } else {
        Verdict::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportEnvelope {
    pub tool: String,
    pub version: String,
    pub suite: String,
    pub shapes: usize,
    /// Per-shape verdicts; sums to `shapes`.
    pub counts: Counts,
    /// Per-record verdicts; sums to `records.len()`.
    pub record_counts: Counts,
    pub records: Vec<Record>,
    /// Only with `--timing`, so that reports stay byte-stable by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_s: Option<f64>,
}

impl ReportEnvelope {
    /// Envelope from the records of each shape, in shape order.
    pub fn new(suite: &str, per_shape: Vec<Vec<Record>>) -> Self {
        let mut counts = Counts::default();
        let mut record_counts = Counts::default();
        for recs in &per_shape {
            counts.add(shape_verdict(recs));
            recs.iter().for_each(|r| record_counts.add(r.status));
        }
        ReportEnvelope {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            suite: suite.into(),
            shapes: per_shape.len(),
            counts,
            record_counts,
            records: per_shape.into_iter().flatten().collect(),
            wall_clock_s: None,
        }
    }

    pub fn any_fail(&self) -> bool {
        self.record_counts.fail > 0
    }

    pub fn write_json(&self, mut w: impl Write) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)
    }

    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(
            w,
            "suite,check,kind,n,K,k,lhs,rhs,ratio,status,ricci_min,convexity_min,free_boundary_pos,free_boundary_angle,half_ball"
        )?;
        for r in &self.records {
            let h = &r.hypotheses;
            let kind = serde_json::to_value(r.shape.kind)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.suite,
                r.check,
                kind,
                r.n,
                r.curvature,
                r.k,
                csv_num(r.lhs),
                csv_num(r.rhs),
                csv_num(r.ratio),
                r.status.as_str(),
                csv_num(h.ricci_min),
                csv_num(h.convexity_min),
                csv_num(h.free_boundary_pos),
                csv_num(h.free_boundary_angle),
                h.half_ball.map(|b| b.to_string()).unwrap_or_default(),
            )?;
        }
        Ok(())
    }
}

/// Scale-normalized size below which both sides of a check count as zero.
pub const NEGLIGIBLE: f64 = 1e-12;

/// `lhs / rhs`, undefined when `rhs ≤ 0` or when both sides are round-off.
pub fn defined_ratio(c: &InequalityCheck, n: usize) -> Option<f64> {
    if c.normalized(c.lhs.abs().max(c.rhs.abs()), n) <= NEGLIGIBLE {
        return None;
    }
    c.ratio().and_then(finite)
}

/// Locale-free number; empty when undefined.
pub fn csv_num(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => format!("{v:e}"),
        _ => String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_keys_are_fixed() {
        let s = ShapeSpec::disk(0, 1.0, 2);
        let r = Record::new("thm1", "free_boundary", &s, 1, 0.0, 0.0, Verdict::Pass, &QuadratureSpec::default());
        let v = serde_json::to_value(&r).unwrap();
        for key in ["suite", "shape", "n", "K", "k", "lhs", "rhs", "ratio", "status", "hypotheses", "quadrature"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        for key in ["ricci_min", "convexity_min", "free_boundary_pos", "free_boundary_angle", "half_ball"] {
            assert!(v["hypotheses"].get(key).is_some(), "{key}");
        }
        assert_eq!(v["status"], "pass");
        assert!(v["ratio"].is_null());
    }

    #[test]
    fn counts_sum_to_shapes_and_records() {
        let s = ShapeSpec::disk(0, 1.0, 2);
        let q = QuadratureSpec::default();
        let recs = vec![
            vec![
                Record::new("x", "a", &s, 1, 1.0, 2.0, Verdict::Pass, &q),
                Record::new("x", "a", &s, 1, 3.0, 2.0, Verdict::Fail, &q),
            ],
            vec![Record::new("x", "a", &s, 1, 1.0, 2.0, Verdict::Inapplicable, &q)],
        ];
        let env = ReportEnvelope::new("x", recs);
        assert_eq!(env.counts.total(), 2);
        assert_eq!(env.counts.fail, 1);
        assert_eq!(env.record_counts.total(), 3);
        assert!(env.any_fail());
        let mut buf = Vec::new();
        env.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.lines().nth(1).unwrap().contains("5e-1"));
    }
}
