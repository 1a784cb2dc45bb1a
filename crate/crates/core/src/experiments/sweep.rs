use serde::{Deserialize, Serialize};

use super::{dimension_stream, pass_threshold, reconstruction_error};
use crate::error::{QstError, Result};
use crate::estimators::{estimate, EstimatorSpec};
use crate::measurement::{BasisSet, BasisType, MeasurementRecord, PovmMap};
use crate::par::{map_indexed, Execution};
use crate::quantum::random_rank_r_state;
use crate::rng::RngStream;

fn default_states_per_cell() -> usize {
    10
}

fn default_threshold() -> f64 {
    1e-5
}

/// Onset sweep over dimensions and ranks with noiseless records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub dims: Vec<usize>,
    pub ranks: Vec<usize>,
    pub basis_type: BasisType,
    #[serde(default = "default_states_per_cell")]
    pub states_per_cell: usize,
    #[serde(default = "default_threshold")]
    pub infidelity_threshold: f64,
    pub max_bases: usize,
    pub seed: u64,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(QstError::InvalidConfig(msg));
        if self.dims.is_empty() {
            return bad("dims must not be empty".into());
        }
        if self.ranks.is_empty() {
            return bad("ranks must not be empty".into());
        }
        if let Some(d) = self.dims.iter().find(|&&d| d < 2) {
            return bad(format!("dimension {d} is below 2"));
        }
        if self.basis_type == BasisType::Custom {
            return bad("sweeps draw random bases; basis_type must be global or local".into());
        }
        if self.basis_type == BasisType::Local {
            if let Some(d) = self.dims.iter().find(|d| !d.is_power_of_two()) {
                return bad(format!("local bases need power-of-two dimensions, got {d}"));
            }
        }
        for &d in &self.dims {
            if let Some(r) = self.ranks.iter().find(|&&r| r == 0 || r > d) {
                return bad(format!("rank {r} is invalid for dimension {d}"));
            }
        }
        if self.states_per_cell == 0 {
            return bad("states_per_cell must be positive".into());
        }
        if !(self.infidelity_threshold > 0.0) {
            return bad("infidelity_threshold must be positive".into());
        }
        if self.max_bases == 0 {
            return bad("max_bases must be positive".into());
        }
        Ok(())
    }
}

/// Outcome of evaluating every state of a cell with the first `n_bases` bases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisCountStats {
    pub n_bases: usize,
    pub failures: usize,
    pub mean_error: f64,
    pub worst_error: f64,
    /// Seeds of the states that missed the threshold at this basis count.
    pub failed_state_seeds: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub dim: usize,
    pub rank: usize,
    pub basis_type: BasisType,
    /// First basis count at which every state passed; `None` if `max_bases`
    /// was reached first.
    pub onset: Option<usize>,
    /// Error threshold actually applied (infidelity for rank 1, Frobenius
    /// distance otherwise).
    pub error_threshold: f64,
    pub basis_seed: u64,
    /// Seed of each state; `random_rank_r_state` on `RngStream::new(seed)`
    /// regenerates it.
    pub state_seeds: Vec<u64>,
    pub per_basis_count: Vec<BasisCountStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub cells: Vec<SweepCell>,
}

impl SweepResult {
    pub fn cell(&self, dim: usize, rank: usize) -> Option<&SweepCell> {
        self.cells.iter().find(|c| c.dim == dim && c.rank == rank)
    }
}

fn run_cell(config: &SweepConfig, dim: usize, rank: usize, exec: Execution) -> Result<SweepCell> {
    // Bases are shared by every rank at this dimension; states are per rank.
    let stream = dimension_stream(config.seed, dim);
    let mut basis_rng = stream.split(0);
    let bases = BasisSet::random(config.basis_type, dim, config.max_bases, &mut basis_rng)?;
    let state_stream = stream.split(1 + rank as u64);
    let state_seeds: Vec<u64> = (0..config.states_per_cell)
        .map(|i| state_stream.split(i as u64).seed())
        .collect();
    let states = state_seeds
        .iter()
        .map(|&seed| random_rank_r_state(dim, rank, &mut RngStream::new(seed)))
        .collect::<Result<Vec<_>>>()?;
    let threshold = pass_threshold(rank, config.infidelity_threshold);
    let spec = EstimatorSpec::least_squares();

    let mut per_basis_count = Vec::new();
    let mut onset = None;
    for k in 1..=config.max_bases {
        let povm = PovmMap::from_bases(&bases.prefix(k));
        let errors = map_indexed(states.len(), exec, |i| -> Result<f64> {
            let record = MeasurementRecord::noiseless(&povm, &states[i])?;
            let fit = estimate(&povm, &record, &spec)?;
            reconstruction_error(rank, &states[i], &fit.rho_hat)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let failed_state_seeds: Vec<u64> = errors
            .iter()
            .zip(&state_seeds)
            .filter(|(e, _)| !(**e <= threshold))
            .map(|(_, s)| *s)
            .collect();
        let failures = failed_state_seeds.len();
        per_basis_count.push(BasisCountStats {
            n_bases: k,
            failures,
            mean_error: errors.iter().sum::<f64>() / errors.len() as f64,
            worst_error: errors.iter().cloned().fold(0.0, f64::max),
            failed_state_seeds,
        });
        if failures == 0 {
            onset = Some(k);
            break;
        }
    }

    Ok(SweepCell {
        dim,
        rank,
        basis_type: config.basis_type,
        onset,
        error_threshold: threshold,
        basis_seed: basis_rng.seed(),
        state_seeds,
        per_basis_count,
    })
}

/// For every `(d, r)` cell, measures random rank-`r` states with a growing
/// prefix of one random basis sequence and reports the first basis count at
/// which least squares recovers all of them.
pub fn run_completeness_sweep(config: &SweepConfig, exec: Execution) -> Result<SweepResult> {
    config.validate()?;
    let mut cells = Vec::new();
    for &dim in &config.dims {
        for &rank in &config.ranks {
            cells.push(run_cell(config, dim, rank, exec)?);
        }
    }
    Ok(SweepResult {
        config: config.clone(),
        cells,
    })
}
