//! The JSON report every command prints.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

/// Stable top-level shape; `results` and `violations` vary by command.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: String,
    pub args: Vec<String>,
    pub config: Value,
    pub seed: Option<u64>,
    pub passed: bool,
    pub results: Value,
    pub violations: Vec<Value>,
    pub timing: Option<Timing>,
}

/// What a command hands back before the report is assembled.
pub struct Outcome {
    pub command: &'static str,
    pub config: Value,
    pub seed: Option<u64>,
    pub passed: bool,
    pub results: Value,
    pub violations: Vec<Value>,
}

pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

impl RunReport {
    pub fn new(outcome: Outcome, args: Vec<String>, started: Option<Instant>) -> Self {
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            command: outcome.command.to_string(),
            args,
            config: outcome.config,
            seed: outcome.seed,
            passed: outcome.passed,
            results: outcome.results,
            violations: outcome.violations,
            timing: started.map(|t| Timing {
                elapsed_ms: t.elapsed().as_secs_f64() * 1e3,
            }),
        }
    }

    pub fn emit(&self, output: Option<&Path>) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        match output {
            Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
                path: path.to_path_buf(),
                source,
            }),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|source| CliError::Io {
                        path: "<stdout>".into(),
                        source,
                    })
            }
        }
    }
}
