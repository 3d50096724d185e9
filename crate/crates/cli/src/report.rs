use std::io::{self, IsTerminal, Write};

use lierem_core::analysis::SampleRank;
use lierem_core::JetSpec;
use serde_json::{json, Map, Value};

/// Output of one command, rendered either as text or as JSON.
#[derive(Debug)]
pub struct Report {
    pub command: &'static str,
    pub spec: Option<JetSpec>,
    pub inputs: Map<String, Value>,
    pub result: Value,
    pub samples: Vec<SampleRank>,
    pub warnings: Vec<String>,
    /// Human-readable body.
    pub lines: Vec<String>,
    /// Set when a computed value disagrees with a reference value.
    pub mismatch: bool,
}

impl Report {
    pub fn new(command: &'static str, spec: Option<JetSpec>) -> Self {
        Report {
            command,
            spec,
            inputs: Map::new(),
            result: Value::Null,
            samples: Vec::new(),
            warnings: Vec::new(),
            lines: Vec::new(),
            mismatch: false,
        }
    }

    pub fn input(&mut self, key: &str, v: impl Into<Value>) {
        self.inputs.insert(key.to_string(), v.into());
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "spec": self.spec.map(|s| json!({"n": s.n, "m": s.m, "r": s.r})),
            "inputs": self.inputs,
            "result": self.result,
            "samples": self.samples.iter().map(|s| json!({"seed_index": s.seed_index, "rank": s.rank})).collect::<Vec<_>>(),
            "warnings": self.warnings,
        })
    }

    pub fn emit(&self, as_json: bool) -> io::Result<()> {
        let mut out = io::stdout().lock();
        if as_json {
            serde_json::to_writer_pretty(&mut out, &self.to_json())?;
            writeln!(out)?;
        } else {
            for l in &self.lines {
                writeln!(out, "{l}")?;
            }
            if self.mismatch {
                writeln!(out, "{}", paint("MISMATCH: computed values differ from the reference", "31"))?;
            }
            let mut err = io::stderr().lock();
            for w in &self.warnings {
                writeln!(err, "warning: {w}")?;
            }
        }
        Ok(())
    }
}

/// ANSI highlighting, only for terminals and only without `NO_COLOR`.
pub fn paint(s: &str, code: &str) -> String {
    let plain = std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty()) || !io::stdout().is_terminal();
    if plain {
        s.to_string()
    } else {
        format!("\x1b[{code}m{s}\x1b[0m")
    }
}
