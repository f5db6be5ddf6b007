use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::config::{Format, RunConfig};
use crate::Failure;

/// Every report: the command, the resolved config, the verdict and the payload.
#[derive(Serialize)]
pub struct Envelope {
    pub command: String,
    pub config: Value,
    pub pass: bool,
    pub result: Value,
}

impl Envelope {
    pub fn new(command: &str, cfg: &RunConfig, pass: bool, result: impl Serialize) -> Result<Self, Failure> {
        let to_value = |v: serde_json::Result<Value>| v.map_err(|e| Failure::config(e.to_string()));
        Ok(Envelope {
            command: command.to_string(),
            config: to_value(serde_json::to_value(cfg))?,
            pass,
            result: to_value(serde_json::to_value(result))?,
        })
    }
}

pub fn write(report: &Envelope, cfg: &RunConfig, out: Option<&Path>) -> Result<(), Failure> {
    let text = match cfg.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).map_err(|e| Failure::config(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Csv => csv(report),
    };
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::config(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::config(e.to_string())),
    }
}

/// `# config` comment lines, then one `path,value` row per leaf of the result.
fn csv(report: &Envelope) -> String {
    let mut s = String::new();
    s.push_str(&format!("# command {}\n", report.command));
    s.push_str(&format!("# config {}\n", report.config));
    s.push_str(&format!("# pass {}\n", report.pass));
    s.push_str("path,value\n");
    let mut rows = Vec::new();
    flatten(&report.result, String::new(), &mut rows);
    for (p, v) in rows {
        s.push_str(&format!("{},{}\n", quote(&p), quote(&v)));
    }
    s
}

fn flatten(v: &Value, path: String, rows: &mut Vec<(String, String)>) {
    let join = |k: &str| if path.is_empty() { k.to_string() } else { format!("{path}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| flatten(x, join(k), rows)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| flatten(x, join(&i.to_string()), rows)),
        Value::String(s) => rows.push((path, s.clone())),
        other => rows.push((path, other.to_string())),
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
