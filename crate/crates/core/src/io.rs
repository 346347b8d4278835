//! Tabular CSV/JSON output and verification reports.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::statlab::{Criterion, Decision};
use crate::suites::SuiteResult;

pub const REPORTS_FILE: &str = "reports.json";
pub const SUMMARY_FILE: &str = "summary.csv";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Parameter(format!("unknown format {s:?}; expected csv or json"))),
        }
    }
}

/// Rows of JSON scalars under named columns. Arrays are allowed as cells;
/// CSV joins them with `;`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.columns)?;
        for row in &self.rows {
            out.write_record(row.iter().map(csv_cell))?;
        }
        out.flush()?;
        Ok(())
    }

    /// One document: the echoed configuration plus one object per row.
    pub fn to_json<C: Serialize>(&self, config: &C) -> Result<Value> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().cloned().zip(r.iter().cloned()).collect()))
            .collect();
        Ok(json!({ "config": serde_json::to_value(config)?, "columns": self.columns, "rows": rows }))
    }

    pub fn write<W: Write, C: Serialize>(&self, format: Format, config: &C, mut w: W) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(w),
            Format::Json => {
                serde_json::to_writer_pretty(&mut w, &self.to_json(config)?)?;
                writeln!(w)?;
                Ok(())
            }
        }
    }

    /// Writes to `path`, or to standard output when `path` is `None`.
    pub fn emit<C: Serialize>(&self, format: Format, config: &C, path: Option<&Path>) -> Result<()> {
        match path {
            Some(p) => {
                let mut w = BufWriter::new(File::create(p)?);
                self.write(format, config, &mut w)?;
                w.flush()?;
                Ok(())
            }
            None => self.write(format, config, std::io::stdout().lock()),
        }
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(csv_cell).collect::<Vec<_>>().join(";"),
        other => other.to_string(),
    }
}

/// Float cell; non-finite values become empty cells.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

fn decision_name(d: Decision) -> &'static str {
    match d {
        Decision::Pass => "pass",
        Decision::Fail => "fail",
        Decision::Warn => "warn",
    }
}

/// One row per report across all suites.
pub fn summary_table(results: &[SuiteResult]) -> Table {
    let mut t = Table::new(&[
        "suite",
        "criterion",
        "name",
        "decision",
        "statistic",
        "threshold",
        "direction",
        "p_value",
        "sample_sizes",
        "seed",
        "runtime_secs",
        "warnings",
    ]);
    for s in results {
        let rows = s
            .criteria
            .iter()
            .flat_map(|c| c.reports.iter().map(move |r| (Some(c.id), r, c.runtime_secs)))
            .chain(s.checks.iter().map(|r| (None, r, r.runtime_secs)));
        for (id, r, secs) in rows {
            t.push(vec![
                json!(s.suite.name()),
                id.map_or(Value::Null, |i| json!(i)),
                json!(r.name),
                json!(decision_name(r.decision)),
                num(r.statistic),
                num(r.threshold),
                json!(match r.criterion {
                    Criterion::AtMost => "at-most",
                    Criterion::AtLeast => "at-least",
                }),
                r.p_value.map_or(Value::Null, num),
                json!(r.sample_sizes),
                r.seed.map_or(Value::Null, |x| json!(x)),
                num(secs),
                json!(r.warnings.join(" | ")),
            ]);
        }
    }
    t
}

/// Writes `reports.json` (configuration echo plus every report) and
/// `summary.csv` into `dir`.
pub fn write_verification<C: Serialize>(dir: &Path, config: &C, results: &[SuiteResult]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let doc = json!({
        "config": serde_json::to_value(config)?,
        "passed": results.iter().all(SuiteResult::passed),
        "suites": serde_json::to_value(results)?,
    });
    let mut w = BufWriter::new(File::create(dir.join(REPORTS_FILE))?);
    serde_json::to_writer_pretty(&mut w, &doc)?;
    writeln!(w)?;
    w.flush()?;
    let mut w = BufWriter::new(File::create(dir.join(SUMMARY_FILE))?);
    summary_table(results).write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> Table {
        let mut t = Table::new(&["k", "x", "list"]);
        t.push(vec![json!(1), num(0.25), nums(&[1.0, 2.5])]);
        t.push(vec![json!("a,b"), num(f64::NAN), json!([])]);
        t
    }

    #[test]
    fn csv_has_header_and_quotes() {
        let mut buf = Vec::new();
        table().write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s, "k,x,list\n1,0.25,1.0;2.5\n\"a,b\",,\n");
    }

    #[test]
    fn json_echoes_config() {
        let v = table().to_json(&json!({"seed": 7})).unwrap();
        assert_eq!(v["config"]["seed"], 7);
        assert_eq!(v["rows"][0]["x"], 0.25);
        assert!(v["rows"][1]["x"].is_null());
    }

    #[test]
    fn format_parsing() {
        assert_eq!("json".parse::<Format>().unwrap(), Format::Json);
        assert!("xml".parse::<Format>().is_err());
    }

    #[test]
    #[should_panic]
    fn ragged_rows_rejected() {
        Table::new(&["a"]).push(vec![json!(1), json!(2)]);
    }
}
