use std::time::SystemTime;

use serde::{Deserialize, Serialize};
use strictqst::Execution;

use crate::io::OutputDigest;

/// Provenance of one experiment run. Everything except the timestamps is a
/// function of the inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub artifact_version: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub execution: Execution,
    pub jobs: Option<usize>,
    pub started_at: String,
    pub finished_at: String,
    pub outputs: Vec<OutputDigest>,
}

pub fn timestamp(t: SystemTime) -> String {
    humantime::format_rfc3339_millis(t).to_string()
}
