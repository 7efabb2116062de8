use clap::ValueEnum;
use pfk_core::verify::CheckReport;
use pfk_core::verify::CheckSuite;
use pfk_core::PfkError;
use serde::Serialize;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "txt",
        }
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    name: &'a str,
    paper_ref: &'a str,
    lhs: f64,
    rhs: f64,
    relation: &'a str,
    tolerance: f64,
    margin: f64,
    pass: bool,
}

pub fn render(suite: &CheckSuite, format: Format) -> Result<String, PfkError> {
    let fail = |e: String| PfkError::InvalidInput(format!("report serialization: {e}"));
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(suite).map_err(|e| fail(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &suite.reports {
                w.serialize(CsvRow {
                    name: &r.name,
                    paper_ref: &r.reference,
                    lhs: r.lhs,
                    rhs: r.rhs,
                    relation: r.relation.symbol(),
                    tolerance: r.tolerance,
                    margin: r.margin,
                    pass: r.pass,
                })
                .map_err(|e| fail(e.to_string()))?;
            }
            if suite.reports.is_empty() {
                w.write_record(["name", "paper_ref", "lhs", "rhs", "relation", "tolerance", "margin", "pass"])
                    .map_err(|e| fail(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| fail(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| fail(e.to_string()))
        }
        Format::Text => Ok(text(suite)),
    }
}

pub fn context_label(r: &CheckReport) -> String {
    let c = &r.context;
    let mut parts = Vec::new();
    if let Some(d) = &c.domain {
        parts.push(d.clone());
    }
    if let Some(n) = c.n {
        parts.push(format!("n={n}"));
    }
    if let Some(p) = c.p {
        parts.push(format!("p={p}"));
    }
    if let Some(res) = c.resolution {
        parts.push(format!("res={res}"));
    }
    if let Some(d) = &c.detail {
        parts.push(d.clone());
    }
    parts.join(" ")
}

fn status(r: &CheckReport) -> &'static str {
    match (r.error.is_some(), r.asserted, r.pass) {
        (true, true, _) => "ERROR",
        (true, false, _) => "info-error",
        (false, false, _) => "info",
        (false, true, true) => "ok",
        (false, true, false) => "FAIL",
    }
}

fn text(suite: &CheckSuite) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<28} {:>14} {:>2} {:>14} {:>11} {:<10} {}\n",
        "check", "lhs", "", "rhs", "margin", "status", "context"
    ));
    for r in &suite.reports {
        out.push_str(&format!(
            "{:<28} {:>14.6e} {:>2} {:>14.6e} {:>11.3e} {:<10} {}\n",
            r.name,
            r.lhs,
            r.relation.symbol(),
            r.rhs,
            r.margin,
            status(r),
            context_label(r)
        ));
    }
    let s = &suite.summary;
    out.push_str(&format!(
        "\n{} checks: {} passed, {} failed, {} errored, {} reported only\nfingerprint {}\n",
        s.total, s.passed, s.failed, s.errored, s.reported, suite.fingerprint
    ));
    out
}
