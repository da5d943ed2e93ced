//! Machine-readable result documents and file artifacts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::RunConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub schema_version: u32,
    pub command: String,
    pub inputs: RunConfig,
    pub outputs: BTreeMap<String, Value>,
    pub warnings: Vec<String>,
}

impl ResultDocument {
    pub fn new(command: &str, inputs: RunConfig, warnings: Vec<String>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            inputs,
            outputs: BTreeMap::new(),
            warnings,
        }
    }

    /// Records a number. Non-finite values become `null`.
    pub fn number(&mut self, key: &str, value: f64) -> &mut Self {
        self.outputs.insert(key.to_string(), Value::from(value));
        self
    }

    pub fn integer(&mut self, key: &str, value: u64) -> &mut Self {
        self.outputs.insert(key.to_string(), Value::from(value));
        self
    }

    pub fn text(&mut self, key: &str, value: &str) -> &mut Self {
        self.outputs.insert(key.to_string(), Value::from(value));
        self
    }

    pub fn flag(&mut self, key: &str, value: bool) -> &mut Self {
        self.outputs.insert(key.to_string(), Value::from(value));
        self
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.outputs.get(key).and_then(Value::as_f64)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Human summary, one `key = value` line per output.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{} ({})", self.command, self.inputs.material.label).unwrap();
        for (k, v) in &self.outputs {
            match v {
                Value::Number(n) if n.is_f64() => {
                    writeln!(s, "  {k:<32} {:.6e}", n.as_f64().unwrap()).unwrap()
                }
                Value::String(t) => writeln!(s, "  {k:<32} {t}").unwrap(),
                other => writeln!(s, "  {k:<32} {other}").unwrap(),
            }
        }
        for w in &self.warnings {
            writeln!(s, "  warning: {w}").unwrap();
        }
        s
    }
}

/// A file produced alongside the result document.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub file_name: String,
    pub contents: String,
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    let tmp: PathBuf = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path).inspect_err(|_| {
        let _ = std::fs::remove_file(&tmp);
    })
}
