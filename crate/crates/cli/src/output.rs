//! Report envelope and rendering.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::Format;

/// Every command prints one of these.
#[derive(Serialize)]
pub struct Envelope {
    pub check: &'static str,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub enum Outcome {
    Report { check: &'static str, holds: bool, report: Value },
    /// Raw text such as a diagram or a category file.
    Artifact(String),
}

impl Outcome {
    pub fn report<T: Serialize>(check: &'static str, holds: bool, report: &T) -> Outcome {
        Outcome::Report {
            check,
            holds,
            report: serde_json::to_value(report).expect("serializable report"),
        }
    }
}

fn text(env: &Envelope) -> String {
    let mut out = format!("check: {}\nholds: {}\n", env.check, env.holds);
    if let Some(e) = &env.error {
        out.push_str(&format!("error: {e}\n"));
    }
    if let Some(Value::Object(fields)) = &env.report {
        for (k, v) in fields.iter().filter(|(k, _)| k.as_str() != "holds") {
            let v = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("{k}: {v}\n"));
        }
    }
    out
}

pub fn render(env: &Envelope, format: Format) -> String {
    match format {
        Format::Text => text(env),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(env).expect("serializable envelope");
            s.push('\n');
            s
        }
    }
}

pub fn emit(text: &str, out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(path) => fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}
