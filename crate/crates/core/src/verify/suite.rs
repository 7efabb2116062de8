use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::discretize::rasterize;
use crate::error::{PfkError, Result};
use crate::geometry::Domain;
use crate::spectral::SolverOptions;

use super::checks::{self, EigenPair};
use super::{
    check_bhattacharya, check_cheeger_bound, check_kappa3, check_limit_p1, check_limit_pinf,
    check_moser_concentric, check_prop1, check_sobolev_p, grid_corpus, radial_corpus, CheckContext,
    CheckReport, CheckSuite, Prop1Case, RadialFunction, Relation, TestFunction,
};

pub const DEFAULT_P_LIST: [f64; 5] = [1.25, 1.5, 2.0, 3.0, 4.0];

const DEFAULT_TOLERANCES: [(&str, f64); 16] = [
    ("bhattacharya", 1e-9),
    ("cheeger_bound", 0.05),
    ("faber_krahn", 0.01),
    ("kappa3_value", 1e-10),
    ("limit_p1", 0.15),
    ("limit_pinf", 0.10),
    ("limit_pinf_geometric", 0.02),
    ("mazya", 0.05),
    ("moser_trudinger", 0.05),
    ("moser_trudinger_identity", 1e-12),
    ("p_gt_n", 0.05),
    ("prop1", 0.01),
    ("prop1_refinement", 0.005),
    ("sharp_p1", 0.01),
    ("sharp_p1_near_sharp", 0.05),
    ("sobolev", 1e-6),
];

/// Per-family tolerances with overrides. Negative overrides are accepted and
/// simply make the affected checks stricter than satisfiable.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Tolerances {
    pub fn keys() -> impl Iterator<Item = &'static str> {
        DEFAULT_TOLERANCES.iter().map(|(k, _)| *k)
    }

    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if !Self::keys().any(|k| k == key) {
            return Err(PfkError::InvalidInput(format!("unknown tolerance key {key:?}")));
        }
        if !value.is_finite() {
            return Err(PfkError::InvalidInput(format!("tolerance {key} must be finite")));
        }
        self.0.insert(key.to_string(), value);
        Ok(())
    }

    pub fn get(&self, key: &str) -> f64 {
        self.0.get(key).copied().unwrap_or_else(|| {
            DEFAULT_TOLERANCES
                .iter()
                .find(|(k, _)| *k == key)
                .map(|(_, v)| *v)
                .unwrap_or_else(|| panic!("no default tolerance for {key}"))
        })
    }

    /// Every key with its effective value.
    pub fn effective(&self) -> BTreeMap<String, f64> {
        Self::keys().map(|k| (k.to_string(), self.get(k))).collect()
    }

    pub fn overrides(&self) -> &BTreeMap<String, f64> {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub resolution: usize,
    pub tolerances: Tolerances,
    /// Quantile levels (and shrunken copies) in the Maz'ya candidate family.
    pub mazya_family: usize,
    pub prop1_levels: usize,
    pub solver: SolverOptions,
    /// Add the p -> 1 and p -> infinity limit checks to every domain.
    pub include_limits: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            resolution: 64,
            tolerances: Tolerances::default(),
            mazya_family: 20,
            prop1_levels: 200,
            solver: SolverOptions::default(),
            include_limits: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogEntry {
    pub name: String,
    pub domain: Domain,
}

impl CatalogEntry {
    pub fn new(name: &str, domain: Domain) -> Self {
        Self {
            name: name.to_string(),
            domain,
        }
    }
}

/// Unit disk, unit square, 2x1 rectangle, square of area pi, annulus 0.5 < r < 1.
pub fn default_catalog() -> Vec<CatalogEntry> {
    let s = std::f64::consts::PI.sqrt();
    vec![
        CatalogEntry::new("unit_disk", Domain::ball(2, 1.0).expect("valid")),
        CatalogEntry::new("unit_square", Domain::rectangle(1.0, 1.0).expect("valid")),
        CatalogEntry::new("rectangle_2x1", Domain::rectangle(2.0, 1.0).expect("valid")),
        CatalogEntry::new("square_area_pi", Domain::rectangle(s, s).expect("valid")),
        CatalogEntry::new("annulus", Domain::annulus(2, 0.5, 1.0).expect("valid")),
    ]
}

/// Catalog file: named domains plus optional defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogFile {
    pub domains: Vec<CatalogEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_list: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
}

impl CatalogFile {
    pub fn default_file() -> Self {
        Self {
            domains: default_catalog(),
            p_list: Some(DEFAULT_P_LIST.to_vec()),
            resolution: None,
            tolerances: BTreeMap::new(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CatalogFile =
            serde_json::from_str(text).map_err(|e| PfkError::InvalidInput(format!("catalog: {e}")))?;
        file.validate()?;
        Ok(file)
    }

    pub fn validate(&self) -> Result<()> {
        if self.domains.is_empty() {
            return Err(PfkError::InvalidInput("catalog lists no domains".into()));
        }
        let mut seen = BTreeSet::new();
        for e in &self.domains {
            if !seen.insert(e.name.as_str()) {
                return Err(PfkError::InvalidInput(format!("duplicate catalog name {:?}", e.name)));
            }
        }
        if let Some(ps) = &self.p_list {
            for &p in ps {
                if !(p.is_finite() && p > 1.0) {
                    return Err(PfkError::InvalidExponent {
                        p,
                        reason: "p must exceed 1",
                    });
                }
            }
        }
        if self.resolution == Some(0) {
            return Err(PfkError::InvalidInput("resolution must be positive".into()));
        }
        let mut t = Tolerances::default();
        for (k, v) in &self.tolerances {
            t.set(k, *v)?;
        }
        Ok(())
    }

    pub fn tolerances(&self) -> Result<Tolerances> {
        let mut t = Tolerances::default();
        for (k, v) in &self.tolerances {
            t.set(k, *v)?;
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, Copy)]
enum Task {
    Kappa3,
    MoserConcentric,
    PerExponent(f64),
    DomainOnly(usize),
    DomainExponent(usize, f64),
}

fn fingerprint(catalog: &[CatalogEntry], p_list: &[f64], cfg: &VerifyConfig) -> String {
    let record = serde_json::json!({
        "catalog": catalog,
        "p_list": p_list,
        "resolution": cfg.resolution,
        "tolerances": cfg.tolerances.effective(),
        "mazya_family": cfg.mazya_family,
        "prop1_levels": cfg.prop1_levels,
        "solver": {
            "tolerance": cfg.solver.tolerance,
            "max_iterations": cfg.solver.max_iterations,
            "inner_tolerance": cfg.solver.inner_tolerance,
            "inner_max_iterations": cfg.solver.inner_max_iterations,
            "seed": cfg.solver.seed,
        },
        "include_limits": cfg.include_limits,
    });
    let digest = Sha256::digest(record.to_string().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

const MOSER_PAIRS: [(f64, f64); 10] = [
    (0.5, 1.0),
    (0.1, 1.0),
    (0.25, 2.0),
    (0.9, 1.0),
    (1.0, 3.0),
    (0.01, 0.5),
    (2.0, 2.5),
    (0.3, 0.31),
    (1e-3, 10.0),
    (4.0, 7.0),
];

fn per_exponent(p: f64, cfg: &VerifyConfig) -> Vec<CheckReport> {
    let mut out = Vec::new();
    for n in [2, 3] {
        out.push(check_bhattacharya(n, p, cfg));
    }
    for n in [2, 3] {
        let reports = Domain::ball(n, 1.0).and_then(|d| {
            let case = Prop1Case::for_exponent(n, p)?;
            let f = TestFunction::Radial(RadialFunction::tent(n, 1.0)?);
            Ok(check_prop1(case, &d, p, &f, cfg))
        });
        match reports {
            Ok(r) => out.extend(r),
            Err(e) => out.push(CheckReport::errored(
                "prop1",
                "capacitary upper bound for the ball eigenvalue",
                Relation::Le,
                cfg.tolerances.get("prop1"),
                CheckContext::new().n(n).p(p),
                &e,
            )),
        }
    }
    if p < 3.0 {
        let corpus = radial_corpus(3, 1.0).and_then(|mut c| {
            c.push(RadialFunction::talenti(3, 50.0)?);
            Ok(c)
        });
        match corpus {
            Ok(c) => out.extend(check_sobolev_p(&c, 3, p, cfg)),
            Err(e) => out.push(CheckReport::errored(
                "sobolev_p",
                "sharp Sobolev inequality",
                Relation::Ge,
                cfg.tolerances.get("sobolev"),
                CheckContext::new().n(3).p(p),
                &e,
            )),
        }
    }
    out
}

fn domain_only(entry: &CatalogEntry, cfg: &VerifyConfig) -> Vec<CheckReport> {
    let d = &entry.domain;
    let mut out = vec![check_cheeger_bound(d, 1.0, cfg)];
    if d.dim() == 2 {
        match rasterize(d, cfg.resolution).map(Arc::new).and_then(|m| grid_corpus(d, &m)) {
            Ok(corpus) => {
                out.extend(checks::check_sharp_p1_triad(&corpus, d, cfg));
                out.extend(checks::check_moser_trudinger(d, &corpus, cfg));
            }
            Err(e) => out.push(CheckReport::errored(
                "grid_corpus",
                "test function corpus",
                Relation::Ge,
                0.0,
                CheckContext::new().domain(d.label()).resolution(cfg.resolution),
                &e,
            )),
        }
    }
    if cfg.include_limits {
        out.extend(check_limit_p1(d, cfg));
        out.extend(check_limit_pinf(d, cfg));
    }
    out
}

fn domain_exponent(entry: &CatalogEntry, p: f64, cfg: &VerifyConfig) -> Vec<CheckReport> {
    let d = &entry.domain;
    let pair = EigenPair::compute(d, p, cfg);
    let mut out = checks::faber_krahn_with(d, p, &pair, cfg);
    out.push(checks::cheeger_bound_with(d, p, pair.own.as_ref().map(|e| e.lambda).map_err(Clone::clone), cfg));
    out.extend(checks::mazya_with(d, p, &pair, cfg));
    if p > d.dim() as f64 {
        out.extend(checks::check_p_gt_n(d, p, cfg));
    }
    out
}

fn run_task(task: Task, catalog: &[CatalogEntry], cfg: &VerifyConfig) -> Vec<CheckReport> {
    match task {
        Task::Kappa3 => check_kappa3(&[1.1, 1.01], cfg),
        Task::MoserConcentric => {
            let mut out = check_moser_concentric(2, &MOSER_PAIRS, cfg);
            out.extend(check_moser_concentric(3, &MOSER_PAIRS, cfg));
            out
        }
        Task::PerExponent(p) => per_exponent(p, cfg),
        Task::DomainOnly(i) => domain_only(&catalog[i], cfg),
        Task::DomainExponent(i, p) => domain_exponent(&catalog[i], p, cfg),
    }
}

/// Every applicable check over `catalog x p_list`, in a fixed order. Tasks
/// run on the current rayon pool; failures and solver errors are recorded,
/// never raised.
pub fn run_suite(catalog: &[CatalogEntry], p_list: &[f64], cfg: &VerifyConfig) -> Result<CheckSuite> {
    if catalog.is_empty() {
        return Err(PfkError::InvalidInput("catalog is empty".into()));
    }
    let print = fingerprint(catalog, p_list, cfg);
    if p_list.is_empty() {
        return Ok(CheckSuite::new(Vec::new(), print));
    }
    let mut tasks = vec![Task::Kappa3, Task::MoserConcentric];
    tasks.extend(p_list.iter().map(|&p| Task::PerExponent(p)));
    for i in 0..catalog.len() {
        tasks.push(Task::DomainOnly(i));
        tasks.extend(p_list.iter().map(|&p| Task::DomainExponent(i, p)));
    }
    let reports: Vec<Vec<CheckReport>> = tasks.par_iter().map(|&t| run_task(t, catalog, cfg)).collect();
    Ok(CheckSuite::new(reports.into_iter().flatten().collect(), print))
}
