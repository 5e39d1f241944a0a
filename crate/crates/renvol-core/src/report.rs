//! Machine-readable run reports shared between the library and the CLI.

use serde::{Deserialize, Serialize};

use crate::gb::GaussBonnetBreakdown;
use crate::series::{LadderSpec, SeriesFit};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckLine {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckLine {
    pub fn new(name: &str, value: f64, tolerance: f64) -> CheckLine {
        CheckLine { name: name.to_string(), value, tolerance, pass: value.abs() <= tolerance }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LadderReport {
    pub label: String,
    pub rungs: Vec<(f64, f64)>,
    pub fit: Option<SeriesFit>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Provenance {
    pub package: String,
    pub version: String,
    pub seed: u64,
    pub ladder: LadderSpec,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportDocument {
    pub verification: String,
    pub config: serde_json::Value,
    pub checks: Vec<CheckLine>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ladders: Vec<LadderReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub breakdowns: Vec<GaussBonnetBreakdown>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepRow>,
    pub passed: bool,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepRow {
    pub t: f64,
    pub v_plus: f64,
    pub c0: f64,
    pub c2: f64,
}

impl ReportDocument {
    pub fn finalize(mut self) -> ReportDocument {
        self.passed = self.checks.iter().all(|c| c.pass);
        self
    }

    /// Flat RFC-4180 CSV: check rows, then ladder rungs, then sweep rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kind,name,value,tolerance,pass\n");
        for c in &self.checks {
            out.push_str(&format!("check,{},{},{},{}\n", c.name, c.value, c.tolerance, c.pass));
        }
        for l in &self.ladders {
            for (eps, v) in &l.rungs {
                out.push_str(&format!("rung,{},{},{},\n", l.label, eps, v));
            }
            if let Some(f) = &l.fit {
                out.push_str(&format!("fit,{}.c0,{},,\n", l.label, f.c0));
                out.push_str(&format!("fit,{}.c2,{},,\n", l.label, f.c2));
                if let Some(cl) = f.c_log {
                    out.push_str(&format!("fit,{}.c_log,{},,\n", l.label, cl));
                }
                out.push_str(&format!("fit,{}.finite_part,{},,\n", l.label, f.finite_part));
            }
        }
        for row in &self.sweep {
            out.push_str(&format!("sweep,t={},{},{},{}\n", row.t, row.v_plus, row.c0, row.c2));
        }
        out
    }
}
