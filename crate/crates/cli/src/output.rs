use std::io::Write;

use anyhow::Result;
use clap::ValueEnum;
use relmirror::{format_rational, Rational};
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

/// One coefficient: which series, where in it, and its exact value.
#[derive(Clone, Debug)]
pub struct Record {
    pub series: String,
    pub selector: Vec<(String, Value)>,
    pub value: Rational,
}

impl Record {
    pub fn new(series: &str, value: Rational) -> Self {
        Self {
            series: series.to_string(),
            selector: Vec::new(),
            value,
        }
    }

    pub fn with(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.selector.push((key.to_string(), v.into()));
        self
    }

    fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("series".into(), self.series.clone().into());
        for (k, v) in &self.selector {
            m.insert(k.clone(), v.clone());
        }
        m.insert("value".into(), format_rational(&self.value).into());
        Value::Object(m)
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Selector keys in first-seen order.
fn columns(records: &[Record]) -> Vec<String> {
    let mut keys: Vec<String> = Vec::new();
    for r in records {
        for (k, _) in &r.selector {
            if !keys.contains(k) {
                keys.push(k.clone());
            }
        }
    }
    keys
}

fn rows(records: &[Record]) -> (Vec<String>, Vec<Vec<String>>) {
    let keys = columns(records);
    let mut header = vec!["series".to_string()];
    header.extend(keys.iter().cloned());
    header.push("value".into());
    let body = records
        .iter()
        .map(|r| {
            let mut row = vec![r.series.clone()];
            for k in &keys {
                row.push(r.selector.iter().find(|(key, _)| key == k).map(|(_, v)| cell(v)).unwrap_or_default());
            }
            row.push(format_rational(&r.value));
            row
        })
        .collect();
    (header, body)
}

pub fn write_table(out: &mut impl Write, header: &[String], body: &[Vec<String>]) -> Result<()> {
    let mut widths: Vec<usize> = header.iter().map(String::len).collect();
    for row in body {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let line = |row: &[String]| {
        row.iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    writeln!(out, "{}", line(header))?;
    for row in body {
        writeln!(out, "{}", line(row))?;
    }
    Ok(())
}

pub fn write_csv(out: &mut impl Write, header: &[String], body: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in body {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit(out: &mut impl Write, format: Format, records: &[Record]) -> Result<()> {
    match format {
        Format::Json => {
            let arr: Vec<Value> = records.iter().map(Record::to_json).collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&arr)?)?;
        }
        Format::Csv => {
            let (header, body) = rows(records);
            write_csv(out, &header, &body)?;
        }
        Format::Pretty => {
            let (header, body) = rows(records);
            write_table(out, &header, &body)?;
        }
    }
    Ok(())
}
