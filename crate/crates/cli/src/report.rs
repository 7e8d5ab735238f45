use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Outcome {
    Yes,
    No,
    Error,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Yes => 0,
            Outcome::No => 1,
            Outcome::Error => 2,
        }
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            Outcome::Yes
        } else {
            Outcome::No
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Yes => "YES",
            Outcome::No => "NO",
            Outcome::Error => "ERROR",
        })
    }
}

/// Summary of one invocation. `result` always matches the exit code.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub result: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    /// Files written by the command.
    pub outputs: Vec<String>,
    pub stats: BTreeMap<String, Value>,
    pub elapsed_ms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Text output of the command when no output file was given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub artifact: Option<String>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            command: command.to_string(),
            inputs: BTreeMap::new(),
            result: Outcome::Error,
            witness: None,
            outputs: Vec::new(),
            stats: BTreeMap::new(),
            elapsed_ms: 0,
            error: None,
            artifact: None,
        }
    }

    pub fn input(&mut self, key: &str, value: impl Serialize) {
        self.inputs
            .insert(key.to_string(), serde_json::to_value(value).expect("serializable"));
    }

    pub fn stat(&mut self, key: &str, value: impl Serialize) {
        self.stats
            .insert(key.to_string(), serde_json::to_value(value).expect("serializable"));
    }
}
