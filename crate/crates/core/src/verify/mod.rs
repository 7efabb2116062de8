//! Inequality harness: each check evaluates one inequality instance and
//! records both sides, the tolerance and the signed slack.

mod checks;
mod corpus;
mod prop1;
mod radial;
mod suite;

pub use checks::{
    check_bhattacharya, check_cheeger_bound, check_faber_krahn, check_kappa3, check_limit_p1,
    check_limit_pinf, check_mazya_sandwich, check_moser_concentric, check_moser_trudinger,
    check_p_gt_n, check_sharp_p1_triad, check_sobolev_p, kappa3, mollified_disk_ratio,
    point_constant, principal_eigenvalue,
};
pub use corpus::{grid_corpus, radial_corpus};
pub use prop1::{check_prop1, prop1_bound, Prop1Bound, Prop1Case, TestFunction};
pub use radial::{radial_integral, RadialFunction};
pub use suite::{default_catalog, run_suite, CatalogEntry, CatalogFile, Tolerances, VerifyConfig, DEFAULT_P_LIST};

use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::PfkError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum Relation {
    #[serde(rename = "≥")]
    Ge,
    #[serde(rename = "≤")]
    Le,
    #[serde(rename = "≈")]
    Approx,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Ge => "≥",
            Relation::Le => "≤",
            Relation::Approx => "≈",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl Serialize for Relation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.symbol())
    }
}

/// Where a check was evaluated.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CheckContext {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn domain(mut self, label: impl Into<String>) -> Self {
        self.domain = Some(label.into());
        self
    }

    pub fn n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn p(mut self, p: f64) -> Self {
        self.p = Some(p);
        self
    }

    pub fn resolution(mut self, r: usize) -> Self {
        self.resolution = Some(r);
        self
    }

    pub fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }
}

/// Signed slack of `lhs relation rhs` after the tolerance, relative to `|rhs|`
/// (absolute when `rhs = 0`). Nonnegative exactly when the relation holds.
pub fn margin(lhs: f64, rhs: f64, relation: Relation, tolerance: f64) -> f64 {
    let scale = if rhs != 0.0 { rhs.abs() } else { 1.0 };
    match relation {
        Relation::Ge => (lhs - rhs) / scale + tolerance,
        Relation::Le => (rhs - lhs) / scale + tolerance,
        Relation::Approx => tolerance - (lhs - rhs).abs() / scale,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    #[serde(rename = "paper_ref")]
    pub reference: String,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
    pub tolerance: f64,
    pub margin: f64,
    pub pass: bool,
    /// Reported checks never count as failures.
    pub asserted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub context: CheckContext,
}

impl CheckReport {
    pub fn evaluate(
        name: impl Into<String>,
        reference: impl Into<String>,
        lhs: f64,
        rhs: f64,
        relation: Relation,
        tolerance: f64,
        context: CheckContext,
    ) -> Self {
        let m = margin(lhs, rhs, relation, tolerance);
        Self {
            name: name.into(),
            reference: reference.into(),
            lhs,
            rhs,
            relation,
            tolerance,
            margin: m,
            pass: m >= 0.0,
            asserted: true,
            error: None,
            context,
        }
    }

    /// A check whose inputs could not be computed.
    pub fn errored(
        name: impl Into<String>,
        reference: impl Into<String>,
        relation: Relation,
        tolerance: f64,
        context: CheckContext,
        err: &PfkError,
    ) -> Self {
        Self {
            name: name.into(),
            reference: reference.into(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            relation,
            tolerance,
            margin: f64::NAN,
            pass: false,
            asserted: true,
            error: Some(err.to_string()),
            context,
        }
    }

    pub fn reported(mut self) -> Self {
        self.asserted = false;
        self
    }

    pub fn is_failure(&self) -> bool {
        self.asserted && !self.pass
    }

    /// `|lhs/rhs - 1|`, the raw gap before tolerance.
    pub fn relative_gap(&self) -> f64 {
        let scale = if self.rhs != 0.0 { self.rhs.abs() } else { 1.0 };
        (self.lhs - self.rhs).abs() / scale
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub reported: usize,
    pub errored: usize,
}

impl Summary {
    pub fn of(reports: &[CheckReport]) -> Self {
        let mut s = Summary {
            total: reports.len(),
            ..Summary::default()
        };
        for r in reports {
            if r.error.is_some() {
                s.errored += 1;
            }
            if !r.asserted {
                s.reported += 1;
            } else if r.pass {
                s.passed += 1;
            } else {
                s.failed += 1;
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSuite {
    pub fingerprint: String,
    pub summary: Summary,
    pub reports: Vec<CheckReport>,
}

impl CheckSuite {
    pub fn new(reports: Vec<CheckReport>, fingerprint: String) -> Self {
        Self {
            fingerprint,
            summary: Summary::of(&reports),
            reports,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckReport> {
        self.reports.iter().filter(|r| r.is_failure())
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn find(&self, name: &str) -> impl Iterator<Item = &CheckReport> + '_ {
        let name = name.to_string();
        self.reports.iter().filter(move |r| r.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margins_follow_relation() {
        assert!((margin(1.1, 1.0, Relation::Ge, 0.0) - 0.1).abs() < 1e-12);
        assert!((margin(0.98, 1.0, Relation::Ge, 0.01) + 0.01).abs() < 1e-12);
        assert!((margin(0.98, 1.0, Relation::Le, 0.0) - 0.02).abs() < 1e-12);
        assert!((margin(1.05, 1.0, Relation::Approx, 0.1) - 0.05).abs() < 1e-12);
        assert_eq!(margin(0.5, 0.0, Relation::Ge, 0.0), 0.5);
    }

    #[test]
    fn report_pass_matches_margin() {
        let r = CheckReport::evaluate("x", "ref", 2.0, 1.0, Relation::Ge, 0.01, CheckContext::new());
        assert!(r.pass && r.margin > 0.0);
        let r = CheckReport::evaluate("x", "ref", 2.0, 1.0, Relation::Ge, -1.5, CheckContext::new());
        assert!(!r.pass && r.is_failure());
        assert!(!r.clone().reported().is_failure());
    }

    #[test]
    fn relation_serializes_as_symbol() {
        assert_eq!(serde_json::to_string(&Relation::Le).unwrap(), "\"≤\"");
        let back: Relation = serde_json::from_str("\"≈\"").unwrap();
        assert_eq!(back, Relation::Approx);
    }

    #[test]
    fn summary_counts() {
        let ok = CheckReport::evaluate("a", "r", 1.0, 1.0, Relation::Approx, 0.1, CheckContext::new());
        let bad = CheckReport::evaluate("b", "r", 1.0, 2.0, Relation::Ge, 0.0, CheckContext::new());
        let rep = bad.clone().reported();
        let err = CheckReport::errored("c", "r", Relation::Ge, 0.0, CheckContext::new(), &PfkError::NotConverged("x".into()));
        let s = Summary::of(&[ok, bad, rep, err]);
        assert_eq!(s, Summary { total: 4, passed: 1, failed: 2, reported: 1, errored: 1 });
    }
}
