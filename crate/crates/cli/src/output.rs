//! Flat output records rendered as text, CSV or line-delimited JSON.
//!
//! All three formats share one numeric rendering so that a value looks
//! the same everywhere: fixed decimal places, eight by default. Fields
//! that are undefined at a given operating point (delay metrics past
//! saturation) stay as empty CSV cells and JSON nulls rather than
//! sentinel numbers.

use std::io::{self, Write};

use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub enum Field {
    UInt(u64),
    Num(f64),
    /// Undefined at this operating point.
    Missing,
    Str(&'static str),
    Bool(bool),
}

#[derive(Debug, Clone)]
pub struct Record {
    pub fields: Vec<(&'static str, Field)>,
}

/// How `Format::Text` lays a batch of records out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TextStyle {
    /// One `key = value` line per field; suits single records.
    KeyValue,
    /// Aligned columns with a header row; suits record streams.
    Table,
}

pub fn fmt_num(v: f64, decimals: usize) -> String {
    let s = format!("{v:.decimals$}");
    // A value that rounds to zero at this precision sheds its sign.
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn cell(field: &Field, decimals: usize) -> String {
    match field {
        Field::UInt(u) => u.to_string(),
        Field::Num(v) => fmt_num(*v, decimals),
        Field::Missing => String::new(),
        Field::Str(s) => (*s).to_string(),
        Field::Bool(b) => b.to_string(),
    }
}

fn json_value(field: &Field, decimals: usize) -> String {
    match field {
        Field::UInt(u) => u.to_string(),
        Field::Num(v) => fmt_num(*v, decimals),
        Field::Missing => "null".to_string(),
        Field::Str(s) => format!("\"{s}\""),
        Field::Bool(b) => b.to_string(),
    }
}

/// Renders a batch of records in the requested format.
pub fn render(records: &[Record], format: Format, decimals: usize, style: TextStyle) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            let header: Vec<&str> = records[0].fields.iter().map(|(k, _)| *k).collect();
            out.push_str(&header.join(","));
            out.push('\n');
            for rec in records {
                let row: Vec<String> =
                    rec.fields.iter().map(|(_, f)| cell(f, decimals)).collect();
                out.push_str(&row.join(","));
                out.push('\n');
            }
        }
        Format::Json => {
            for rec in records {
                let body: Vec<String> = rec
                    .fields
                    .iter()
                    .map(|(k, f)| format!("\"{k}\": {}", json_value(f, decimals)))
                    .collect();
                out.push_str(&format!("{{{}}}\n", body.join(", ")));
            }
        }
        Format::Text => match style {
            TextStyle::KeyValue => {
                for (i, rec) in records.iter().enumerate() {
                    if i > 0 {
                        out.push('\n');
                    }
                    for (k, f) in &rec.fields {
                        out.push_str(&format!("{k} = {}\n", cell(f, decimals)));
                    }
                }
            }
            TextStyle::Table => {
                let keys: Vec<&str> = records[0].fields.iter().map(|(k, _)| *k).collect();
                let mut widths: Vec<usize> = keys.iter().map(|k| k.len()).collect();
                let rows: Vec<Vec<String>> = records
                    .iter()
                    .map(|rec| rec.fields.iter().map(|(_, f)| cell(f, decimals)).collect())
                    .collect();
                for row in &rows {
                    for (w, c) in widths.iter_mut().zip(row) {
                        *w = (*w).max(c.len());
                    }
                }
                let header: Vec<String> = keys
                    .iter()
                    .zip(&widths)
                    .map(|(k, w)| format!("{k:>w$}"))
                    .collect();
                out.push_str(&header.join("  "));
                out.push('\n');
                for row in &rows {
                    let line: Vec<String> = row
                        .iter()
                        .zip(&widths)
                        .map(|(c, w)| format!("{c:>w$}"))
                        .collect();
                    out.push_str(&line.join("  "));
                    out.push('\n');
                }
            }
        },
    }
    out
}

/// Writes to stdout, treating a broken pipe (e.g. `mmm roots | head`)
/// as a normal early exit rather than a panic.
pub fn print_stdout(s: &str) {
    let mut stdout = io::stdout().lock();
    if let Err(err) = stdout.write_all(s.as_bytes()).and_then(|()| stdout.flush()) {
        if err.kind() == io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("failed to write output: {err}");
        std::process::exit(1);
    }
}

pub fn emit(records: &[Record], format: Format, decimals: usize, style: TextStyle) {
    print_stdout(&render(records, format, decimals, style));
}
