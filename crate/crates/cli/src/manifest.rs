//! Run manifests, schema `v1`.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::output::OutputFile;

pub const SCHEMA: &str = "v1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub subcommand: String,
    /// The fully resolved parameter set. Feeding it back through `replay`
    /// reproduces every listed output.
    pub parameters: Value,
    pub seed: Option<u64>,
    pub started_at_unix: f64,
    pub tool_version: String,
    pub library_versions: Vec<(String, String)>,
    pub outputs: Vec<OutputFile>,
    /// Health counters and fallback flags of the run.
    pub health: Value,
}

impl RunManifest {
    pub fn new(subcommand: &str, parameters: Value, seed: Option<u64>, started: SystemTime) -> Self {
        Self {
            schema: SCHEMA.into(),
            subcommand: subcommand.into(),
            parameters,
            seed,
            started_at_unix: started.duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            library_versions: vec![
                ("free-jacobi".into(), env!("CARGO_PKG_VERSION").into()),
                ("free-jacobi-core".into(), env!("CARGO_PKG_VERSION").into()),
                ("free-jacobi-matsim".into(), env!("CARGO_PKG_VERSION").into()),
            ],
            outputs: Vec::new(),
            health: Value::Null,
        }
    }
}

/// File name of the manifest inside an output directory.
pub const MANIFEST_FILE: &str = "manifest.json";
