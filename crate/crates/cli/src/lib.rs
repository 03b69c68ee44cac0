//! Scenario-driven front end for the `oamlos` simulator.
//!
//! A scenario file fixes frequency, array geometry, transmitter type and the
//! sweep settings. Each command writes one CSV plus a `manifest.json` from
//! which [`commands::rerun`] repeats the run byte for byte.

pub mod commands;
pub mod error;
pub mod manifest;
pub mod output;
pub mod scenario;

pub use commands::{execute, rerun, Invocation, PatternCutArgs, RunReport};
pub use error::{CliError, ParseError, ValidationError};
pub use manifest::RunManifest;
pub use scenario::{parse_scenario, Configuration, Scenario, TxType};
