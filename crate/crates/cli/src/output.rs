//! Report envelopes and the three output formats.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde_json::{json, Map, Value};

pub const SCHEMA: &str = "schlicht-kit/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// A finished command result: the JSON body, CSV rows and a text rendering.
pub struct Report {
    pub command: &'static str,
    pub mode: &'static str,
    pub tolerance: f64,
    pub body: Map<String, Value>,
    pub csv_header: Vec<&'static str>,
    pub csv_rows: Vec<Vec<String>>,
    pub text: String,
}

impl Report {
    pub fn envelope(&self) -> Value {
        let mut out = Map::new();
        out.insert("schema".into(), json!(SCHEMA));
        out.insert("command".into(), json!(self.command));
        out.insert("mode".into(), json!(self.mode));
        out.insert("tolerance".into(), json!(self.tolerance));
        out.insert(
            "generated_at".into(),
            json!(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)),
        );
        for (k, v) in &self.body {
            out.insert(k.clone(), v.clone());
        }
        Value::Object(out)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        Ok(match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.envelope())?;
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.csv_header)?;
                for row in &self.csv_rows {
                    w.write_record(row)?;
                }
                String::from_utf8(w.into_inner()?)?
            }
            Format::Text => format!(
                "# {} (mode {}, tolerance {:e})\n{}",
                self.command, self.mode, self.tolerance, self.text
            ),
        })
    }

    pub fn emit(&self, format: Format, out: Option<&Path>) -> Result<()> {
        let rendered = self.render(format)?;
        match out {
            Some(path) => fs::write(path, rendered)
                .with_context(|| format!("cannot write {}", path.display()))?,
            None => std::io::stdout().lock().write_all(rendered.as_bytes())?,
        }
        Ok(())
    }
}
