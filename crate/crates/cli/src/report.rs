use std::io::{self, Write};

use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// One output line: a record kind followed by ordered fields.
#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub kind: &'static str,
    fields: Vec<(String, Value)>,
    /// Field whose value is printed without its key in text mode.
    bare: Option<String>,
}

impl Record {
    pub fn new(kind: &'static str) -> Self {
        Record { kind, fields: Vec::new(), bare: None }
    }

    pub fn field(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.fields.push((key.to_string(), value.into()));
        self
    }

    pub fn show(self, key: &str, value: impl ToString) -> Self {
        self.field(key, value.to_string())
    }

    pub fn tag(mut self, key: &str, value: &str) -> Self {
        self.bare = Some(key.to_string());
        self.field(key, value)
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        map.insert("record".into(), Value::String(self.kind.into()));
        for (k, v) in &self.fields {
            map.insert(k.clone(), v.clone());
        }
        Value::Object(map)
    }

    pub fn to_text(&self) -> String {
        let mut out = self.kind.to_string();
        for (k, v) in &self.fields {
            out.push(' ');
            if self.bare.as_deref() == Some(k.as_str()) {
                out.push_str(&text_value(v));
            } else {
                out.push_str(k);
                out.push('=');
                out.push_str(&text_value(v));
            }
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.to_text(),
            Format::Json => self.to_json().to_string(),
        }
    }
}

fn text_value(v: &Value) -> String {
    match v {
        Value::String(s) if needs_quotes(s) => Value::String(s.clone()).to_string(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn needs_quotes(s: &str) -> bool {
    s.is_empty() || s.chars().any(|c| c.is_whitespace() || c == '"' || c == '=')
}

pub fn emit(out: &mut dyn Write, records: &[Record], format: Format) -> io::Result<()> {
    for r in records {
        writeln!(out, "{}", r.render(format))?;
    }
    Ok(())
}
