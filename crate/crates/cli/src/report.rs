use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable or schema-invalid model files.
    Usage(String),
    /// Failures while computing.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }

    pub fn usage(e: impl fmt::Display) -> Self {
        CliError::Usage(e.to_string())
    }

    pub fn runtime(e: impl fmt::Display) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    command: String,
    model_digest: Option<String>,
    parameters: Map<String, Value>,
    outputs: Vec<PathBuf>,
    passed: bool,
    summary: Value,
    wall_time_ms: f64,
    error: Option<String>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            command: command.to_string(),
            model_digest: None,
            parameters: Map::new(),
            outputs: Vec::new(),
            passed: true,
            summary: Value::Null,
            wall_time_ms: 0.0,
            error: None,
        }
    }

    pub fn set_digest(&mut self, digest: String) {
        self.model_digest = Some(digest);
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        self.parameters.insert(
            key.to_string(),
            serde_json::to_value(value).unwrap_or(Value::Null),
        );
    }

    pub fn output(&mut self, path: PathBuf) {
        self.outputs.push(path);
    }

    pub fn summary(&mut self, passed: bool, summary: Value) {
        self.passed = passed;
        self.summary = summary;
    }

    pub fn fail(&mut self, e: &CliError) {
        self.passed = false;
        self.error = Some(e.to_string());
    }

    pub fn finish(mut self, start: Instant, out: Option<&Path>) {
        self.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
        let text = serde_json::to_string_pretty(&self).expect("report serializes");
        if let Some(path) = out.map(|d| d.join("report.json")) {
            if std::fs::write(&path, format!("{text}\n")).is_ok() {
                return;
            }
        }
        eprintln!("{text}");
    }
}
