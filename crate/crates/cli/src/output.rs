//! Tables and reports rendered as JSON, CSV or aligned text.

use std::time::{SystemTime, UNIX_EPOCH};

use eisenlab::report::MomentReport;
use serde_json::{json, Map, Value};

use crate::config::OutputFormat;

pub const SCHEMA: u64 = 1;

/// Rows of JSON scalars under named columns. Numbers are rendered through
/// serde_json in every format, so CSV and JSON carry the same digits.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    fn records(&self) -> Vec<Value> {
        self.rows
            .iter()
            .map(|r| {
                let m: Map<String, Value> = self.columns.iter().cloned().zip(r.iter().cloned()).collect();
                Value::Object(m)
            })
            .collect()
    }
}

/// What a command produced: a table, and for checks the pass flags.
pub struct Output {
    pub command: String,
    pub table: Table,
    /// JSON records when they differ from the table rows
    pub records: Option<Vec<Value>>,
    pub pass: Option<bool>,
    pub seed: Option<u64>,
}

impl Output {
    pub fn table(command: impl Into<String>, table: Table) -> Self {
        Output {
            command: command.into(),
            table,
            records: None,
            pass: None,
            seed: None,
        }
    }

    pub fn reports(command: impl Into<String>, reports: &[MomentReport]) -> Self {
        let mut table = Table::new(&[
            "check_name",
            "pass",
            "lhs_re",
            "lhs_im",
            "rhs_re",
            "rhs_im",
            "abs_err",
            "rel_err",
            "tolerance",
            "metadata",
        ]);
        for r in reports {
            let meta: Vec<String> = r.metadata.iter().map(|(k, v)| format!("{k}={v}")).collect();
            table.push(vec![
                json!(r.check_name),
                json!(r.pass),
                num(r.lhs.re),
                num(r.lhs.im),
                num(r.rhs.re),
                num(r.rhs.im),
                num(r.abs_err),
                num(r.rel_err),
                num(r.tolerance),
                json!(meta.join(";")),
            ]);
        }
        Output {
            command: command.into(),
            table,
            records: Some(
                reports
                    .iter()
                    .map(|r| serde_json::to_value(r).expect("report serializes"))
                    .collect(),
            ),
            pass: Some(reports.iter().all(|r| r.pass)),
            seed: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => self.json(),
            OutputFormat::Csv => csv(&self.table),
            OutputFormat::Text => self.text(),
        }
    }

    fn json(&self) -> String {
        let generated_at = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let mut doc = Map::new();
        doc.insert("schema".into(), json!(SCHEMA));
        doc.insert("command".into(), json!(self.command));
        if let Some(seed) = self.seed {
            doc.insert("seed".into(), json!(seed));
        }
        if let Some(pass) = self.pass {
            doc.insert("pass".into(), json!(pass));
        }
        doc.insert("generated_at".into(), json!(generated_at));
        doc.insert(
            "records".into(),
            Value::Array(self.records.clone().unwrap_or_else(|| self.table.records())),
        );
        let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("json");
        s.push('\n');
        s
    }

    fn text(&self) -> String {
        let cells: Vec<Vec<String>> = self.table.rows.iter().map(|r| r.iter().map(plain).collect()).collect();
        let widths: Vec<usize> = (0..self.table.columns.len())
            .map(|j| {
                cells
                    .iter()
                    .map(|r| r[j].chars().count())
                    .chain([self.table.columns[j].chars().count()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |r: &[String]| -> String {
            let parts: Vec<String> = r.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            parts.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = line(&self.table.columns);
        for r in &cells {
            out += &line(r);
        }
        if let Some(pass) = self.pass {
            if self.table.columns.get(1).map(String::as_str) != Some("pass") {
                return out + if pass { "PASS\n" } else { "FAIL\n" };
            }
            let failed = self
                .table
                .rows
                .iter()
                .filter(|r| r.get(1) == Some(&Value::Bool(false)))
                .count();
            out += &format!(
                "{}: {} of {} checks passed\n",
                if pass { "PASS" } else { "FAIL" },
                self.table.rows.len() - failed,
                self.table.rows.len()
            );
        }
        out
    }
}

/// A float as JSON; non-finite values become strings so they survive.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn csv(t: &Table) -> String {
    let field = |s: String| {
        if s.contains([',', '"', '\n']) {
            format!("\"{}\"", s.replace('"', "\"\""))
        } else {
            s
        }
    };
    let mut out = t.columns.iter().cloned().map(field).collect::<Vec<_>>().join(",") + "\n";
    for r in &t.rows {
        out += &(r.iter().map(|v| field(plain(v))).collect::<Vec<_>>().join(",") + "\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_and_json_share_digits() {
        let mut t = Table::new(&["N", "value"]);
        t.push(vec![json!(5), num(0.1 + 0.2)]);
        t.push(vec![json!(13), num(f64::NAN)]);
        let o = Output::table("x", t);
        let c = o.render(OutputFormat::Csv);
        let j: Value = serde_json::from_str(&o.render(OutputFormat::Json)).unwrap();
        assert_eq!(j["schema"], 1);
        let first = j["records"][0]["value"].to_string();
        assert!(c.lines().nth(1).unwrap().ends_with(&first), "{c} vs {first}");
        assert_eq!(j["records"][1]["value"], "NaN");
    }

    #[test]
    fn csv_quotes_fields() {
        let mut t = Table::new(&["a"]);
        t.push(vec![json!("x=1;y=\"2\",z")]);
        assert_eq!(csv(&t), "a\n\"x=1;y=\"\"2\"\",z\"\n");
    }
}
