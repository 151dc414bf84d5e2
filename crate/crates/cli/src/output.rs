//! One result shape for every command, rendered as JSON, CSV or text.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde_json::{Map, Value};
use subcrit::BigFloat;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Decimal digits carried by a `bits`-bit float.
pub fn digits(bits: usize) -> usize {
    ((bits as f64) / 3.3).floor() as usize
}

pub fn float(x: &BigFloat, bits: usize) -> Value {
    Value::String(x.to_decimal_string(digits(bits)))
}

pub struct Output {
    pub command: &'static str,
    pub meta: Vec<(&'static str, Value)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

impl Output {
    pub fn new(command: &'static str, columns: Vec<&'static str>) -> Self {
        Output { command, meta: Vec::new(), columns, rows: Vec::new() }
    }

    pub fn meta(&mut self, key: &'static str, v: impl Into<Value>) -> &mut Self {
        self.meta.push((key, v.into()));
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.json(),
            Format::Csv => self.csv(),
            Format::Text => self.text(),
        }
    }

    fn json(&self) -> String {
        let mut top = Map::new();
        top.insert("schema_version".into(), SCHEMA_VERSION.into());
        top.insert("command".into(), self.command.into());
        for (k, v) in &self.meta {
            top.insert((*k).into(), v.clone());
        }
        let rows = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().map(|c| c.to_string()).zip(r.iter().cloned()).collect()))
            .collect();
        top.insert("rows".into(), Value::Array(rows));
        let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("json values serialize");
        s.push('\n');
        s
    }

    fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r.iter().map(plain)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    fn text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(s, "{k}: {}", plain(v));
        }
        if self.rows.is_empty() {
            return s;
        }
        if !self.meta.is_empty() {
            s.push('\n');
        }
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(plain).collect()).collect();
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|i| cells.iter().map(|r| r[i].len()).chain([self.columns[i].len()]).max().unwrap_or(0))
            .collect();
        let line = |s: &mut String, items: &mut dyn Iterator<Item = &str>| {
            let parts: Vec<String> = items.zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            let _ = writeln!(s, "{}", parts.join("  ").trim_end());
        };
        line(&mut s, &mut self.columns.iter().copied());
        for r in &cells {
            line(&mut s, &mut r.iter().map(String::as_str));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Output {
        let mut o = Output::new("demo", vec!["n", "value"]);
        o.meta("class", "trees");
        o.rows.push(vec![1.into(), "a,b".into()]);
        o
    }

    #[test]
    fn formats() {
        let o = sample();
        let j: Value = serde_json::from_str(&o.render(Format::Json)).unwrap();
        assert_eq!(j["schema_version"], 1);
        assert_eq!(j["rows"][0]["value"], "a,b");
        assert_eq!(o.render(Format::Csv), "n,value\n1,\"a,b\"\n");
        assert!(o.render(Format::Text).starts_with("class: trees\n\nn  value\n1  a,b"));
    }

    #[test]
    fn digit_count_follows_precision() {
        assert_eq!(digits(256), 77);
        assert_eq!(digits(64), 19);
    }
}
