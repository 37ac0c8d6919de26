//! Tabular output shared by every subcommand: values, sections, and the
//! text / CSV / JSON renderers.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde_json::{Map, Number, Value as Json};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Missing,
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Num(v)
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as u64)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Value::Missing, Into::into)
    }
}

impl Value {
    fn render(&self, precision: usize, missing: &str) -> String {
        match self {
            Value::Num(v) => sig_digits(*v, precision),
            Value::Int(v) => v.to_string(),
            Value::Bool(v) => v.to_string(),
            Value::Text(s) => s.clone(),
            Value::Missing => missing.to_string(),
        }
    }

    fn to_json(&self, precision: usize) -> Json {
        match self {
            Value::Num(v) => sig_digits(*v, precision)
                .parse::<f64>()
                .ok()
                .and_then(Number::from_f64)
                .map_or(Json::Null, Json::Number),
            Value::Int(v) => Json::Number((*v).into()),
            Value::Bool(v) => Json::Bool(*v),
            Value::Text(s) => Json::String(s.clone()),
            Value::Missing => Json::Null,
        }
    }
}

/// `%g`-style formatting with `digits` significant digits: fixed notation
/// for exponents in `[-5, digits)`, scientific otherwise, trailing zeros
/// dropped.
pub fn sig_digits(v: f64, digits: usize) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.into();
    }
    if v == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{:.*}", decimals, v)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    /// One set of named values.
    Record(Vec<(String, Value)>),
    Table {
        columns: Vec<String>,
        rows: Vec<Vec<Value>>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: String,
    pub body: Body,
}

/// A command's output, possibly several named sections.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Document {
    pub sections: Vec<Section>,
    /// Free-form lines shown only in text output.
    pub notes: Vec<String>,
}

#[derive(Debug, Default)]
pub struct RecordBuilder(Vec<(String, Value)>);

impl RecordBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Into<Value>) -> &mut Self {
        self.0.push((key.into(), value.into()));
        self
    }

    pub fn build(self) -> Body {
        Body::Record(self.0)
    }
}

impl Document {
    pub fn single(name: &str, body: Body) -> Self {
        Self {
            sections: vec![Section {
                name: name.into(),
                body,
            }],
            notes: Vec::new(),
        }
    }

    pub fn with_section(mut self, name: &str, body: Body) -> Self {
        self.sections.push(Section {
            name: name.into(),
            body,
        });
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn render(&self, format: OutputFormat, precision: usize) -> String {
        match format {
            OutputFormat::Text => self.to_text(precision),
            OutputFormat::Csv => self.to_csv(precision),
            OutputFormat::Json => self.to_json_string(precision),
        }
    }

    fn to_text(&self, precision: usize) -> String {
        let mut out = String::new();
        for (i, section) in self.sections.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            if self.sections.len() > 1 {
                let _ = writeln!(out, "[{}]", section.name);
            }
            match &section.body {
                Body::Record(fields) => {
                    let width = fields.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                    for (k, v) in fields {
                        let _ = writeln!(out, "{k:<width$}  {}", v.render(precision, "-"));
                    }
                }
                Body::Table { columns, rows } => {
                    let cells: Vec<Vec<String>> = rows
                        .iter()
                        .map(|r| r.iter().map(|v| v.render(precision, "-")).collect())
                        .collect();
                    let widths: Vec<usize> = columns
                        .iter()
                        .enumerate()
                        .map(|(j, c)| {
                            cells
                                .iter()
                                .map(|r| r[j].len())
                                .chain([c.len()])
                                .max()
                                .unwrap_or(0)
                        })
                        .collect();
                    let line = |fields: &[String]| {
                        fields
                            .iter()
                            .zip(&widths)
                            .map(|(f, w)| format!("{f:<w$}"))
                            .collect::<Vec<_>>()
                            .join("  ")
                            .trim_end()
                            .to_string()
                    };
                    let _ = writeln!(out, "{}", line(columns));
                    for r in &cells {
                        let _ = writeln!(out, "{}", line(r));
                    }
                }
            }
        }
        for note in &self.notes {
            let _ = writeln!(out, "note: {note}");
        }
        out
    }

    /// Records become a header plus one row; tables a header plus rows.
    /// Multiple sections are separated by a blank line.
    fn to_csv(&self, precision: usize) -> String {
        let mut out = Vec::new();
        for (i, section) in self.sections.iter().enumerate() {
            if i > 0 {
                out.push(b'\n');
            }
            let mut w = csv::Writer::from_writer(&mut out);
            let result = match &section.body {
                Body::Record(fields) => w
                    .write_record(fields.iter().map(|(k, _)| k.as_str()))
                    .and_then(|_| {
                        w.write_record(fields.iter().map(|(_, v)| v.render(precision, "")))
                    }),
                Body::Table { columns, rows } => w.write_record(columns).and_then(|_| {
                    rows.iter()
                        .try_for_each(|r| w.write_record(r.iter().map(|v| v.render(precision, ""))))
                }),
            };
            result
                .and_then(|_| w.flush().map_err(Into::into))
                .expect("write to memory");
        }
        String::from_utf8(out).expect("csv output is utf-8")
    }

    pub fn to_json(&self, precision: usize) -> Json {
        let section_json = |body: &Body| match body {
            Body::Record(fields) => Json::Object(record_json(fields, precision)),
            Body::Table { columns, rows } => Json::Array(
                rows.iter()
                    .map(|r| {
                        Json::Object(
                            columns
                                .iter()
                                .cloned()
                                .zip(r.iter().map(|v| v.to_json(precision)))
                                .collect(),
                        )
                    })
                    .collect(),
            ),
        };
        match self.sections.as_slice() {
            [only] => section_json(&only.body),
            many => Json::Object(
                many.iter()
                    .map(|s| (s.name.clone(), section_json(&s.body)))
                    .collect(),
            ),
        }
    }

    fn to_json_string(&self, precision: usize) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json(precision)).expect("json value");
        s.push('\n');
        s
    }
}

fn record_json(fields: &[(String, Value)], precision: usize) -> Map<String, Json> {
    fields
        .iter()
        .map(|(k, v)| (k.clone(), v.to_json(precision)))
        .collect()
}
