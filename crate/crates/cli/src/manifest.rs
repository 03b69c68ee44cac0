//! Run manifests: everything needed to repeat a command.

use crate::commands::Invocation;
use crate::error::{CliError, ParseError};
use crate::scenario::Scenario;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool: String,
    pub tool_version: String,
    /// UTC, RFC 3339.
    pub timestamp: String,
    pub command: Invocation,
    pub scenario: Scenario,
    pub seed: u64,
    pub fec_threshold: f64,
    /// File names relative to the manifest's directory.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(invocation: Invocation, scenario: Scenario, outputs: Vec<String>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: env!("CARGO_PKG_NAME").to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            command: invocation,
            seed: scenario.seed,
            scenario,
            fec_threshold: oamlos::link::FEC_THRESHOLD,
            outputs,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serialises");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str, origin: &str) -> Result<Self, CliError> {
        let m: RunManifest = serde_json::from_str(text).map_err(|e| ParseError {
            path: origin.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        if m.schema_version != SCHEMA_VERSION {
            return Err(CliError::Manifest(format!(
                "schema version {} not supported (expected {SCHEMA_VERSION})",
                m.schema_version
            )));
        }
        if m.seed != m.scenario.seed {
            return Err(CliError::Manifest(format!("seed {} disagrees with scenario seed {}", m.seed, m.scenario.seed)));
        }
        m.scenario.validate()?;
        Ok(m)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text, &path.display().to_string())
    }
}
