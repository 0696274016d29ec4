//! Campaign reports: per-cell inputs/outputs/verdicts plus CSV and JSON
//! emission. CSV carries the full parameter tuple on every row with 17
//! significant digits; JSON follows the schema
//! {campaign, params, cells: [{inputs, outputs, anchor, verdict}], summary}.

use std::fmt;
use std::fs;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};

/// A typed value in a cell's input or output record.
#[derive(Debug, Clone)]
pub enum CellValue {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl CellValue {
    fn csv(&self) -> String {
        match self {
            CellValue::Num(x) => format!("{x:.16e}"),
            CellValue::Int(i) => i.to_string(),
            CellValue::Text(s) => s.clone(),
            CellValue::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            CellValue::Num(x) => json!(x),
            CellValue::Int(i) => json!(i),
            CellValue::Text(s) => json!(s),
            CellValue::Bool(b) => json!(b),
        }
    }
}

impl From<f64> for CellValue {
    fn from(x: f64) -> Self {
        CellValue::Num(x)
    }
}

impl From<i64> for CellValue {
    fn from(i: i64) -> Self {
        CellValue::Int(i)
    }
}

impl From<u32> for CellValue {
    fn from(i: u32) -> Self {
        CellValue::Int(i as i64)
    }
}

impl From<&str> for CellValue {
    fn from(s: &str) -> Self {
        CellValue::Text(s.to_string())
    }
}

impl From<String> for CellValue {
    fn from(s: String) -> Self {
        CellValue::Text(s)
    }
}

impl From<bool> for CellValue {
    fn from(b: bool) -> Self {
        CellValue::Bool(b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// Reported for context, not gated (e.g. behavior below the asymptotic
    /// regime).
    Info,
    /// A numeric failure inside the cell; the campaign continues.
    Error(String),
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Info => "info",
            Verdict::Error(_) => "error",
        }
    }

    /// Pass iff a tolerance-style check holds; keeps call sites terse.
    pub fn check(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Error(msg) => write!(f, "error: {msg}"),
            other => f.write_str(other.label()),
        }
    }
}

/// One verification cell: a parameter tuple, computed outputs, the
/// mathematical claim it checks, and the verdict.
#[derive(Debug, Clone)]
pub struct Cell {
    pub inputs: Vec<(String, CellValue)>,
    pub outputs: Vec<(String, CellValue)>,
    pub anchor: String,
    pub verdict: Verdict,
}

impl Cell {
    pub fn new(anchor: &str) -> Self {
        Cell {
            inputs: Vec::new(),
            outputs: Vec::new(),
            anchor: anchor.to_string(),
            verdict: Verdict::Info,
        }
    }

    pub fn input(mut self, key: &str, v: impl Into<CellValue>) -> Self {
        self.inputs.push((key.to_string(), v.into()));
        self
    }

    pub fn output(mut self, key: &str, v: impl Into<CellValue>) -> Self {
        self.outputs.push((key.to_string(), v.into()));
        self
    }

    pub fn verdict(mut self, v: Verdict) -> Self {
        self.verdict = v;
        self
    }

    /// Convenience: wraps a fallible computation; an Err turns into an
    /// error verdict with the message attached.
    pub fn from_result<T>(
        anchor: &str,
        inputs: Vec<(String, CellValue)>,
        r: Result<T>,
        fill: impl FnOnce(Cell, T) -> Cell,
    ) -> Cell {
        let base = Cell {
            inputs,
            outputs: Vec::new(),
            anchor: anchor.to_string(),
            verdict: Verdict::Info,
        };
        match r {
            Ok(v) => fill(base, v),
            Err(e) => base.verdict(Verdict::Error(e.to_string())),
        }
    }
}

/// Tallies over a report's cells.
#[derive(Debug, Clone, Copy, Default)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub info: usize,
    pub error: usize,
}

impl Summary {
    pub fn all_passed(&self) -> bool {
        self.fail == 0 && self.error == 0
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub campaign: String,
    pub params: Vec<(String, CellValue)>,
    pub cells: Vec<Cell>,
    /// Generated plotting script for the emitted CSV, when the campaign has
    /// a natural picture.
    pub plot_script: Option<String>,
}

impl Report {
    pub fn new(campaign: &str) -> Self {
        Report {
            campaign: campaign.to_string(),
            params: Vec::new(),
            cells: Vec::new(),
            plot_script: None,
        }
    }

    pub fn param(&mut self, key: &str, v: impl Into<CellValue>) {
        self.params.push((key.to_string(), v.into()));
    }

    pub fn summary(&self) -> Summary {
        let mut s = Summary {
            total: self.cells.len(),
            ..Summary::default()
        };
        for c in &self.cells {
            match c.verdict {
                Verdict::Pass => s.pass += 1,
                Verdict::Fail => s.fail += 1,
                Verdict::Info => s.info += 1,
                Verdict::Error(_) => s.error += 1,
            }
        }
        s
    }

    pub fn has_numeric_error(&self) -> bool {
        self.cells
            .iter()
            .any(|c| matches!(c.verdict, Verdict::Error(_)))
    }

    pub fn to_json(&self) -> Value {
        let mut params = Map::new();
        for (k, v) in &self.params {
            params.insert(k.clone(), v.json());
        }
        let cells: Vec<Value> = self
            .cells
            .iter()
            .map(|c| {
                let mut inputs = Map::new();
                for (k, v) in &c.inputs {
                    inputs.insert(k.clone(), v.json());
                }
                let mut outputs = Map::new();
                for (k, v) in &c.outputs {
                    outputs.insert(k.clone(), v.json());
                }
                json!({
                    "inputs": inputs,
                    "outputs": outputs,
                    "anchor": c.anchor,
                    "verdict": c.verdict.to_string(),
                })
            })
            .collect();
        let s = self.summary();
        json!({
            "campaign": self.campaign,
            "params": params,
            "cells": cells,
            "summary": {
                "total": s.total,
                "pass": s.pass,
                "fail": s.fail,
                "info": s.info,
                "error": s.error,
                "all_passed": s.all_passed(),
            },
        })
    }

    /// Column order: campaign, the union of input keys in first-seen order,
    /// then the union of output keys, then the verdict. Cells missing a
    /// column leave it empty.
    pub fn csv_header(&self) -> Vec<String> {
        let mut cols = vec!["campaign".to_string()];
        let seen = |cols: &mut Vec<String>, key: &String| {
            if !cols.iter().any(|c| c == key) {
                cols.push(key.clone());
            }
        };
        for c in &self.cells {
            for (k, _) in &c.inputs {
                seen(&mut cols, k);
            }
        }
        for c in &self.cells {
            for (k, _) in &c.outputs {
                seen(&mut cols, k);
            }
        }
        cols.push("anchor".to_string());
        cols.push("verdict".to_string());
        cols
    }

    pub fn to_csv(&self) -> Result<String> {
        let header = self.csv_header();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&header)
            .map_err(|e| Error::invalid(format!("csv: {e}")))?;
        for c in &self.cells {
            let row: Vec<String> = header
                .iter()
                .map(|col| match col.as_str() {
                    "campaign" => self.campaign.clone(),
                    "anchor" => c.anchor.clone(),
                    "verdict" => c.verdict.label().to_string(),
                    key => c
                        .inputs
                        .iter()
                        .chain(&c.outputs)
                        .find(|(k, _)| k == key)
                        .map(|(_, v)| v.csv())
                        .unwrap_or_default(),
                })
                .collect();
            w.write_record(&row)
                .map_err(|e| Error::invalid(format!("csv: {e}")))?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::invalid(format!("csv: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::invalid(format!("csv: {e}")))
    }

    /// Writes `<campaign>.csv` / `<campaign>.json` / `plot_<campaign>.py`
    /// under `dir` according to `format` ("csv", "json" or "both").
    pub fn write(&self, dir: &Path, format: &str) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::invalid(format!("mkdir {dir:?}: {e}")))?;
        let write = |name: String, data: String| -> Result<()> {
            fs::write(dir.join(&name), data)
                .map_err(|e| Error::invalid(format!("write {name}: {e}")))
        };
        let csv_wanted = matches!(format, "csv" | "both");
        let json_wanted = matches!(format, "json" | "both");
        if !csv_wanted && !json_wanted {
            return Err(Error::invalid(format!("unknown output format '{format}'")));
        }
        if csv_wanted {
            write(format!("{}.csv", self.campaign), self.to_csv()?)?;
            if let Some(script) = &self.plot_script {
                write(format!("plot_{}.py", self.campaign), script.clone())?;
            }
        }
        if json_wanted {
            let mut text = serde_json::to_string_pretty(&self.to_json())
                .map_err(|e| Error::invalid(format!("json: {e}")))?;
            text.push('\n');
            write(format!("{}.json", self.campaign), text)?;
        }
        Ok(())
    }
}

/// A small matplotlib script plotting `y_cols` against `x_col` from the
/// campaign's CSV, log-log.
pub fn loglog_plot_script(campaign: &str, x_col: &str, y_cols: &[&str]) -> String {
    let ys = y_cols
        .iter()
        .map(|y| format!("    plot_series(rows, {x_col:?}, {y:?})\n"))
        .collect::<String>();
    format!(
        r#"#!/usr/bin/env python3
"""Log-log plot for the {campaign} campaign CSV (same directory)."""
import csv
import matplotlib.pyplot as plt


def load(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def plot_series(rows, xcol, ycol):
    pts = [(float(r[xcol]), float(r[ycol])) for r in rows if r.get(xcol) and r.get(ycol)]
    if not pts:
        return
    pts.sort()
    plt.loglog([p[0] for p in pts], [p[1] for p in pts], "o-", label=ycol)


def main():
    rows = load("{campaign}.csv")
{ys}    plt.xlabel({x_col:?})
    plt.legend()
    plt.title("{campaign}")
    plt.tight_layout()
    plt.savefig("{campaign}.png", dpi=150)


if __name__ == "__main__":
    main()
"#
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_report() -> Report {
        let mut rep = Report::new("demo");
        rep.param("n", 2u32);
        rep.cells.push(
            Cell::new("two plus two is four")
                .input("t", 1.5)
                .output("value", 4.0)
                .verdict(Verdict::Pass),
        );
        rep.cells.push(
            Cell::new("a failing claim")
                .input("t", 2.5)
                .output("ratio", 9.0)
                .verdict(Verdict::Fail),
        );
        rep
    }

    #[test]
    fn csv_has_full_tuple_and_17_digits() {
        let rep = sample_report();
        let csv = rep.to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "campaign,t,value,ratio,anchor,verdict");
        let row = lines.next().unwrap();
        assert!(row.starts_with("demo,1.5000000000000000e0,"), "{row}");
        assert!(row.ends_with("pass"), "{row}");
        // 1 leading + 16 fractional digits = 17 significant digits.
        assert!(row.contains("4.0000000000000000e0"));
    }

    #[test]
    fn json_schema_fields_present() {
        let rep = sample_report();
        let v = rep.to_json();
        assert_eq!(v["campaign"], "demo");
        assert_eq!(v["params"]["n"], 2);
        assert_eq!(v["cells"][0]["verdict"], "pass");
        assert_eq!(v["cells"][1]["outputs"]["ratio"], 9.0);
        assert_eq!(v["summary"]["total"], 2);
        assert_eq!(v["summary"]["all_passed"], false);
    }

    #[test]
    fn summary_counts_verdicts() {
        let mut rep = sample_report();
        rep.cells.push(Cell::new("x").verdict(Verdict::Error("boom".into())));
        let s = rep.summary();
        assert_eq!((s.total, s.pass, s.fail, s.error), (3, 1, 1, 1));
        assert!(!s.all_passed());
        assert!(rep.has_numeric_error());
    }

    #[test]
    fn plot_script_mentions_columns() {
        let s = loglog_plot_script("demo", "t", &["value"]);
        assert!(s.contains("demo.csv"));
        assert!(s.contains("\"value\""));
    }
}
