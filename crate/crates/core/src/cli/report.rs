//! Machine-readable run reports: JSON, CSV and two-column plot data.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::audits::{AuditReport, Verdict};
use crate::error::Result;

/// Tool name and version recorded in every report.
#[derive(Clone, Debug, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
}

impl Default for Metadata {
    fn default() -> Self {
        Self { tool: env!("CARGO_PKG_NAME"), version: env!("CARGO_PKG_VERSION") }
    }
}

/// The discretisation a step ran on (its finest grid for refinement studies).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridInfo {
    pub level: usize,
    pub resolution: Vec<usize>,
    pub nodes: usize,
    /// Largest grid spacing.
    pub h: f64,
    pub stencil_order: usize,
}

/// One computed eigenvalue.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenvalueEntry {
    pub problem: String,
    pub beta: Option<f64>,
    pub level: usize,
    pub h: f64,
    pub value: f64,
    /// Residual of the discrete pencil; absent for extrapolated values.
    pub residual_norm: Option<f64>,
    /// `raw` or `extrapolated`.
    pub method: &'static str,
}

/// One level of a refinement study.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RefinementEntry {
    pub level: usize,
    pub h: f64,
    pub value: f64,
    /// Error used by the order fit.
    pub error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostic {
    pub name: String,
    pub value: f64,
}

/// A catalog listing entry.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub id: String,
    pub kind: &'static str,
    pub dim: usize,
    pub closed: bool,
    pub variables: Vec<String>,
    pub description: String,
}

/// Results of one scenario step.
#[derive(Clone, Debug, Default, Serialize)]
pub struct StepReport {
    pub command: String,
    pub geometry: Option<String>,
    pub grid: Option<GridInfo>,
    pub parameters: serde_json::Map<String, serde_json::Value>,
    pub audits: Vec<AuditReport>,
    pub eigenvalues: Vec<EigenvalueEntry>,
    pub refinement: Vec<RefinementEntry>,
    pub diagnostics: Vec<Diagnostic>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub catalog: Vec<CatalogEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl StepReport {
    pub fn diagnostic(&mut self, name: &str, value: f64) {
        self.diagnostics.push(Diagnostic { name: name.to_string(), value });
    }

    /// Add an audit, moving its diagnostics into the step as `audit.name`.
    pub fn push_audit(&mut self, audit: AuditReport) {
        for (k, v) in &audit.diagnostics {
            self.diagnostic(&format!("{}.{k}", audit.name), *v);
        }
        self.audits.push(audit);
    }
}

/// A full run: metadata and the steps in order.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub metadata: Metadata,
    pub steps: Vec<StepReport>,
}

impl Report {
    /// 2 if a step failed to run, else 1 if any audit failed, else 2 if any
    /// hypothesis was unmet, else 0.
    pub fn exit_code(&self) -> i32 {
        let verdicts = || self.steps.iter().flat_map(|s| s.audits.iter().map(|a| a.verdict));
        if self.steps.iter().any(|s| s.error.is_some()) {
            2
        } else if verdicts().any(|v| v == Verdict::Fail) {
            1
        } else if verdicts().any(|v| v == Verdict::HypothesisUnmet) {
            2
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    /// Audit table with columns name, lhs, rhs, relative_margin, hypotheses,
    /// sharp, verdict.
    pub fn audit_csv(&self) -> String {
        let mut out = String::from("name,lhs,rhs,relative_margin,hypotheses,sharp,verdict\n");
        for a in self.steps.iter().flat_map(|s| &s.audits) {
            let hyps: Vec<String> = a
                .hypotheses
                .iter()
                .map(|h| format!("{}={}", h.name, if h.satisfied { "true" } else { "false" }))
                .collect();
            out += &format!(
                "{},{},{},{},{},{},{}\n",
                csv_field(&a.name),
                number(a.lhs),
                number(a.rhs),
                number(a.relative_margin),
                csv_field(&hyps.join(";")),
                a.sharp,
                a.verdict.as_str()
            );
        }
        out
    }

    /// Eigenvalue table with columns problem, beta, level, h, value,
    /// residual_norm, method.
    pub fn eigenvalue_csv(&self) -> String {
        let mut out = String::from("problem,beta,level,h,value,residual_norm,method\n");
        for e in self.steps.iter().flat_map(|s| &s.eigenvalues) {
            let opt = |x: Option<f64>| x.map(number).unwrap_or_default();
            out += &format!(
                "{},{},{},{},{},{},{}\n",
                csv_field(&e.problem),
                opt(e.beta),
                e.level,
                number(e.h),
                number(e.value),
                opt(e.residual_norm),
                e.method
            );
        }
        out
    }

    /// `h residual` lines of every refinement study; studies of different
    /// steps are separated by a blank line.
    pub fn plot_data(&self) -> String {
        let blocks: Vec<String> = self
            .steps
            .iter()
            .filter(|s| !s.refinement.is_empty())
            .map(|s| {
                s.refinement
                    .iter()
                    .map(|r| format!("{} {}\n", number(r.h), number(r.error.unwrap_or(r.value))))
                    .collect()
            })
            .collect();
        blocks.join("\n")
    }

    pub fn has_eigenvalues(&self) -> bool {
        self.steps.iter().any(|s| !s.eigenvalues.is_empty())
    }

    /// Human-readable summary.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            out += &format!("== {}", s.command);
            if let Some(g) = &s.geometry {
                out += &format!(" on {g}");
            }
            if let Some(grid) = &s.grid {
                out += &format!(" (level {}, {} nodes, h = {:.4e})", grid.level, grid.nodes, grid.h);
            }
            out += "\n";
            if let Some(e) = &s.error {
                out += &format!("   error: {e}\n");
            }
            for r in &s.refinement {
                out += &format!(
                    "   level {:>2}  h = {:.6e}  value = {:+.9e}{}\n",
                    r.level,
                    r.h,
                    r.value,
                    r.error.map(|e| format!("  error = {e:.3e}")).unwrap_or_default()
                );
            }
            for e in &s.eigenvalues {
                let beta = e.beta.map(|b| format!(" beta = {b}")).unwrap_or_default();
                out += &format!("   {}{beta} [{}, level {}]: {:.10}\n", e.problem, e.method, e.level, e.value);
            }
            for a in &s.audits {
                out += &format!(
                    "   {:<16} {}  lhs = {:.10e}  rhs = {:.10e}  margin = {:+.3e}{}\n",
                    a.verdict.as_str(),
                    a.name,
                    a.lhs,
                    a.rhs,
                    a.relative_margin,
                    if a.sharp { "  (sharp)" } else { "" }
                );
                for h in a.hypotheses.iter().filter(|h| !h.satisfied) {
                    out += &format!("      unmet: {} (witness {:.3e})\n", h.name, h.witness);
                }
            }
            for d in &s.diagnostics {
                out += &format!("   {} = {:.6e}\n", d.name, d.value);
            }
            for c in &s.catalog {
                out += &format!(
                    "   {:<14} {:<12} n = {}  {}  [{}]  {}\n",
                    c.id,
                    c.kind,
                    c.dim,
                    if c.closed { "closed  " } else { "boundary" },
                    c.variables.join(", "),
                    c.description
                );
            }
        }
        out
    }

    /// Write the requested files; JSON goes to stdout when no path is given.
    pub fn emit(&self, json: Option<&Path>, csv: Option<&Path>, plot: Option<&Path>) -> Result<()> {
        let text = self.to_json();
        match json {
            Some(p) => std::fs::write(p, text + "\n")?,
            None => {
                let mut out = io::stdout().lock();
                out.write_all(text.as_bytes())?;
                out.write_all(b"\n")?;
            }
        }
        if let Some(p) = csv {
            std::fs::write(p, self.audit_csv())?;
            if self.has_eigenvalues() {
                std::fs::write(eigenvalue_path(p), self.eigenvalue_csv())?;
            }
        }
        if let Some(p) = plot {
            std::fs::write(p, self.plot_data())?;
        }
        Ok(())
    }
}

/// `table.csv` → `table.eigenvalues.csv`.
pub fn eigenvalue_path(csv: &Path) -> std::path::PathBuf {
    let stem = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    csv.with_file_name(format!("{stem}.eigenvalues.csv"))
}

/// Decimal scientific notation with 17 significant digits.
pub fn number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Pretty JSON with floats as `{:.16e}` and non-finite floats as `null`.
struct ReportFormatter(PrettyFormatter<'static>);

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*)),* $(,)?) => {
        $(fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
            self.0.$name(w $(, $arg)*)
        })*
    };
}

impl Formatter for ReportFormatter {
    delegate!(
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        begin_object_value(),
        end_object_value(),
    );

    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{}", number(value))
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
}

/// Serialize with the report float format.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ReportFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("report serialization cannot fail");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audits::Relation;

    fn step_with_audit() -> StepReport {
        let mut s = StepReport { command: "audit minkowski".into(), ..Default::default() };
        s.push_audit(
            AuditReport::new("minkowski", 1.0, 0.5, Relation::AtLeast, vec![], 1e-6).with_diagnostic("spread", 0.25),
        );
        s
    }

    #[test]
    fn floats_use_seventeen_digits_and_null_for_non_finite() {
        let v = serde_json::json!({"a": 0.1, "b": 3, "c": [1.5]});
        let text = to_json(&v);
        assert!(text.contains("\"a\": 1.0000000000000001e-1"), "{text}");
        assert!(text.contains("\"b\": 3"));
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["a"].as_f64(), Some(0.1));
        assert_eq!(parsed["c"][0].as_f64(), Some(1.5));
        let d = Diagnostic { name: "x".into(), value: f64::NAN };
        assert!(to_json(&d).contains("\"value\": null"));
    }

    #[test]
    fn empty_report_is_valid_json() {
        let r = Report { steps: vec![StepReport { command: "catalog".into(), ..Default::default() }], ..Default::default() };
        let parsed: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(parsed["steps"][0]["audits"].as_array().unwrap().len(), 0);
        assert_eq!(parsed["metadata"]["tool"], "reilly");
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn one_audit_gives_one_csv_row() {
        let r = Report { steps: vec![step_with_audit()], ..Default::default() };
        let csv = r.audit_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "name,lhs,rhs,relative_margin,hypotheses,sharp,verdict");
        assert!(lines[1].starts_with("minkowski,1.0000000000000000e0,5.0000000000000000e-1,"));
        assert!(lines[1].ends_with(",false,PASS"));
        let parsed: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        let audit = parsed["steps"][0]["audits"][0].as_object().unwrap();
        let keys: Vec<&str> = audit.keys().map(String::as_str).collect();
        assert_eq!(keys.len(), 7);
        for k in ["name", "lhs", "rhs", "relative_margin", "hypotheses", "sharp", "verdict"] {
            assert!(keys.contains(&k));
        }
        assert_eq!(parsed["steps"][0]["diagnostics"][0]["name"], "minkowski.spread");
    }

    #[test]
    fn plot_data_has_one_row_per_level() {
        let mut s = StepReport::default();
        for (l, h) in [0.4, 0.2, 0.1, 0.05].into_iter().enumerate() {
            s.refinement.push(RefinementEntry { level: l, h, value: h * h, error: Some(h * h) });
        }
        let r = Report { steps: vec![s], ..Default::default() };
        let text = r.plot_data();
        let rows: Vec<Vec<f64>> =
            text.lines().map(|l| l.split_whitespace().map(|x| x.parse().unwrap()).collect()).collect();
        assert_eq!(rows.len(), 4);
        assert!(rows.windows(2).all(|w| w[1][0] < w[0][0]));
        assert!(rows.iter().all(|r| r.len() == 2 && (r[1] - r[0] * r[0]).abs() < 1e-15));
    }

    #[test]
    fn exit_code_precedence() {
        let mut fail = step_with_audit();
        fail.audits[0].verdict = Verdict::Fail;
        let mut unmet = step_with_audit();
        unmet.audits[0].verdict = Verdict::HypothesisUnmet;
        let errored = StepReport { error: Some("bad".into()), ..Default::default() };
        let code = |steps: Vec<StepReport>| Report { steps, ..Default::default() }.exit_code();
        assert_eq!(code(vec![step_with_audit()]), 0);
        assert_eq!(code(vec![unmet.clone()]), 2);
        assert_eq!(code(vec![unmet.clone(), fail.clone()]), 1);
        assert_eq!(code(vec![fail, errored]), 2);
    }
}
