//! Check records, CSV files and the run summary.

use anyhow::{Context, Result};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    /// Passes iff `value <= threshold` (NaN fails).
    pub fn le(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, pass: value <= threshold }
    }

    /// Passes iff `value >= threshold`.
    pub fn ge(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, pass: value >= threshold }
    }

    /// Boolean check, recorded as value 1 (true) or 0 against threshold 1.
    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self { name: name.into(), value: if ok { 1.0 } else { 0.0 }, threshold: 1.0, pass: ok }
    }

    fn to_json(&self) -> Value {
        json!({ "name": self.name, "value": self.value, "threshold": self.threshold, "pass": self.pass })
    }
}

/// What a subcommand produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub outputs: Vec<PathBuf>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Shortest round-trip scientific notation.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

pub fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn numeric_row(xs: &[f64]) -> Vec<String> {
    xs.iter().map(|&x| num(x)).collect()
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

pub struct Summary<'a> {
    pub command: &'a str,
    pub config: Option<Value>,
    pub outcome: Option<&'a Outcome>,
    pub error: Option<String>,
    pub exit_code: i32,
}

impl Summary<'_> {
    pub fn to_json(&self) -> Value {
        let status = match self.exit_code {
            EXIT_PASS => "pass",
            EXIT_CHECK_FAILED => "fail",
            EXIT_CONFIG => "config_error",
            _ => "error",
        };
        let (checks, outputs): (Vec<Value>, Vec<String>) = match self.outcome {
            Some(o) => (o.checks.iter().map(Check::to_json).collect(), o.outputs.iter().map(|p| p.display().to_string()).collect()),
            None => (vec![], vec![]),
        };
        json!({
            "command": self.command,
            "status": status,
            "exit_code": self.exit_code,
            "config": self.config,
            "checks": checks,
            "outputs": outputs,
            "error": self.error,
        })
    }

    /// Writes `summary.json` into `dir`, creating it if needed.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join("summary.json");
        let text = serde_json::to_string_pretty(&self.to_json())?;
        std::fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}
