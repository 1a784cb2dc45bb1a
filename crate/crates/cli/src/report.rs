//! Flat CSV tables for experiment results. Plots are rendered from these
//! tables alone.

use serde::{Deserialize, Serialize};
use strictqst::experiments::{NoisyProtocolResult, RobustnessScan, SweepResult};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub n_bases: usize,
    pub estimator: String,
    pub mean_infidelity: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub dim: usize,
    pub rank: usize,
    pub n_bases: usize,
    pub states: usize,
    pub failures: usize,
    pub mean_error: f64,
    pub worst_error: f64,
    pub error_threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessRow {
    pub epsilon: f64,
    pub mean_error: f64,
    pub max_error: f64,
}

pub fn curve_rows(result: &NoisyProtocolResult) -> Vec<CurveRow> {
    result
        .curves
        .iter()
        .map(|p| CurveRow {
            n_bases: p.n_bases,
            estimator: p.estimator.name().to_string(),
            mean_infidelity: p.mean_infidelity,
            stderr: p.stderr,
        })
        .collect()
}

pub fn sweep_rows(result: &SweepResult) -> Vec<SweepRow> {
    result
        .cells
        .iter()
        .flat_map(|cell| {
            cell.per_basis_count.iter().map(move |s| SweepRow {
                dim: cell.dim,
                rank: cell.rank,
                n_bases: s.n_bases,
                states: cell.state_seeds.len(),
                failures: s.failures,
                mean_error: s.mean_error,
                worst_error: s.worst_error,
                error_threshold: cell.error_threshold,
            })
        })
        .collect()
}

pub fn robustness_rows(scan: &RobustnessScan) -> Vec<RobustnessRow> {
    scan.points
        .iter()
        .map(|p| RobustnessRow {
            epsilon: p.epsilon,
            mean_error: p.mean_error,
            max_error: p.max_error,
        })
        .collect()
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> CliResult<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

pub fn from_csv<T: for<'de> Deserialize<'de>>(text: &str) -> CliResult<Vec<T>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|e| CliError::Usage(format!("malformed CSV: {e}")))
}
