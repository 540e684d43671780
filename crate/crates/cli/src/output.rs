//! Text and line-delimited JSON reports.

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

/// Writes one record per call. Structured records are single JSON objects
/// with a `record` key; object keys are sorted so the output is stable.
pub struct Emitter {
    format: Format,
    lines: Vec<String>,
}

impl Emitter {
    pub fn new(format: Format) -> Self {
        Emitter { format, lines: Vec::new() }
    }

    pub fn record(&mut self, name: &str, fields: Value, text: impl FnOnce() -> Vec<String>) {
        match self.format {
            Format::Text => self.lines.extend(text()),
            Format::Structured => {
                let mut obj = match fields {
                    Value::Object(m) => m,
                    other => {
                        let mut m = Map::new();
                        m.insert("value".into(), other);
                        m
                    }
                };
                obj.insert("record".into(), Value::String(name.into()));
                self.lines.push(Value::Object(obj).to_string());
            }
        }
    }

    pub fn finish(self) -> String {
        let mut out = self.lines.join("\n");
        if !out.is_empty() {
            out.push('\n');
        }
        out
    }
}

/// Serializes a library value; every type handed in has an infallible
/// serializer.
pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize to JSON")
}

pub fn texts<T: ToString>(items: &[T]) -> Vec<String> {
    items.iter().map(ToString::to_string).collect()
}

pub fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "undetected".to_string(), ToString::to_string)
}
