use std::io::Write;

use clap::ValueEnum;
use serde_json::{Map, Value};

use bishape_core::{Error, IntPolynomial};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Degree to coefficient, both as decimal strings, in increasing degree.
pub fn coefficient_map(p: &IntPolynomial) -> Value {
    let map: Map<String, Value> = p
        .terms()
        .map(|(d, c)| (d.to_string(), Value::String(c.to_string())))
        .collect();
    Value::Object(map)
}

fn flatten(prefix: &str, v: &Value, into: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => {
            for (k, inner) in map {
                flatten(&key(k), inner, into);
            }
        }
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(scalar).collect();
            into.push((prefix.to_string(), parts.join(" ")));
        }
        other => into.push((prefix.to_string(), scalar(other))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        Value::Array(items) => items.iter().map(scalar).collect::<Vec<_>>().join("-"),
        other => other.to_string(),
    }
}

/// Record writer. CSV output repeats the header whenever the columns change.
pub struct Out<W: Write> {
    pub format: Format,
    sink: W,
    header: Option<Vec<String>>,
}

impl<W: Write> Out<W> {
    pub fn new(format: Format, sink: W) -> Self {
        Out {
            format,
            sink,
            header: None,
        }
    }

    pub fn record(&mut self, v: &Value) -> Result<(), Error> {
        match self.format {
            Format::Json => writeln!(self.sink, "{v}")?,
            Format::Csv => {
                let mut cells = Vec::new();
                flatten("", v, &mut cells);
                let keys: Vec<String> = cells.iter().map(|(k, _)| k.clone()).collect();
                if self.header.as_ref() != Some(&keys) {
                    writeln!(self.sink, "{}", keys.join(","))?;
                    self.header = Some(keys);
                }
                let values: Vec<String> = cells.into_iter().map(|(_, v)| v).collect();
                writeln!(self.sink, "{}", values.join(","))?;
            }
            Format::Text => {
                let mut cells = Vec::new();
                flatten("", v, &mut cells);
                let parts: Vec<String> = cells.into_iter().map(|(k, v)| format!("{k}={v}")).collect();
                writeln!(self.sink, "{}", parts.join(" "))?;
            }
        }
        Ok(())
    }

    pub fn line(&mut self, text: &str) -> Result<(), Error> {
        writeln!(self.sink, "{text}")?;
        Ok(())
    }

    pub fn raw(&mut self, text: &str) -> Result<(), Error> {
        self.sink.write_all(text.as_bytes())?;
        Ok(())
    }

    pub fn finish(&mut self) -> Result<(), Error> {
        self.sink.flush()?;
        Ok(())
    }
}
