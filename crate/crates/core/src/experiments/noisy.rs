use serde::{Deserialize, Serialize};

use super::{dimension_stream, mean_and_stderr};
use crate::error::{QstError, Result};
use crate::estimators::{estimate, EstimatorKind, EstimatorSpec};
use crate::measurement::{
    sample_record_with, BasisSet, BasisType, MeasurementRecord, PovmMap, DEFAULT_NOISE_SCALE,
};
use crate::par::{map_indexed, Execution};
use crate::quantum::{infidelity, random_full_rank_state, random_pure_state, StateModel};
use crate::rng::RngStream;

fn default_targets() -> usize {
    20
}
fn default_q() -> f64 {
    1e-3
}
fn default_estimators() -> Vec<EstimatorKind> {
    vec![
        EstimatorKind::TraceMin,
        EstimatorKind::LeastSquares,
        EstimatorKind::MaxLikelihood,
    ]
}
fn default_min_bases() -> usize {
    1
}
fn default_noise_scale() -> f64 {
    DEFAULT_NOISE_SCALE
}

/// Near-pure targets `σ = (1 - q)|ψ⟩⟨ψ| + qτ` measured with finite shots and
/// reconstructed by several estimators at every basis count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoisyProtocolConfig {
    pub dim: usize,
    pub basis_type: BasisType,
    #[serde(default = "default_targets")]
    pub n_targets: usize,
    #[serde(default = "default_q")]
    pub q: f64,
    /// Defaults to `300 d`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots_per_basis: Option<u64>,
    /// Use exact probabilities instead of sampled frequencies.
    #[serde(default)]
    pub noiseless: bool,
    #[serde(default = "default_estimators")]
    pub estimators: Vec<EstimatorKind>,
    #[serde(default = "default_min_bases")]
    pub min_bases: usize,
    pub max_bases: usize,
    /// `c` in the trace-minimization ball radius `ε = c √(k d / N)`.
    #[serde(default = "default_noise_scale")]
    pub noise_scale: f64,
    pub seed: u64,
}

impl NoisyProtocolConfig {
    pub fn shots(&self) -> u64 {
        self.shots_per_basis.unwrap_or(300 * self.dim as u64)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(QstError::InvalidConfig(msg));
        if self.dim < 2 {
            return bad(format!("dimension {} is below 2", self.dim));
        }
        match self.basis_type {
            BasisType::Custom => return bad("basis_type must be global or local".into()),
            BasisType::Local if !self.dim.is_power_of_two() => {
                return bad(format!("local bases need a power-of-two dimension, got {}", self.dim))
            }
            _ => {}
        }
        if self.n_targets == 0 {
            return bad("n_targets must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.q) {
            return bad(format!("q = {} outside [0, 1]", self.q));
        }
        if self.shots() == 0 {
            return bad("shots_per_basis must be positive".into());
        }
        if self.estimators.is_empty() {
            return bad("estimators must not be empty".into());
        }
        if self.estimators.contains(&EstimatorKind::Feasibility) {
            return bad("the protocol compares trace_min, least_squares and max_likelihood".into());
        }
        if self.min_bases == 0 || self.min_bases > self.max_bases {
            return bad(format!(
                "basis range {}..={} is empty",
                self.min_bases, self.max_bases
            ));
        }
        if !(self.noise_scale >= 0.0) {
            return bad("noise_scale must be non-negative".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub n_bases: usize,
    pub estimator: EstimatorKind,
    pub mean_infidelity: f64,
    pub stderr: f64,
    /// Per-target infidelities; `None` where the estimator reported the
    /// data infeasible.
    pub samples: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoisyProtocolResult {
    pub config: NoisyProtocolConfig,
    pub shots_per_basis: u64,
    pub basis_seed: u64,
    pub target_seeds: Vec<u64>,
    pub curves: Vec<CurvePoint>,
}

impl NoisyProtocolResult {
    pub fn curve(&self, estimator: EstimatorKind) -> Vec<&CurvePoint> {
        self.curves.iter().filter(|p| p.estimator == estimator).collect()
    }

    pub fn point(&self, estimator: EstimatorKind, n_bases: usize) -> Option<&CurvePoint> {
        self.curves
            .iter()
            .find(|p| p.estimator == estimator && p.n_bases == n_bases)
    }
}

/// Child of the dimension stream reserved for targets, far from the indices
/// the sweep uses for its per-rank states.
const TARGET_STREAM: u64 = u64::MAX;

/// Infidelities of one target, indexed `[basis count][estimator]`.
fn run_target(
    config: &NoisyProtocolConfig,
    povms: &[PovmMap],
    seed: u64,
) -> Result<Vec<Vec<Option<f64>>>> {
    let mut rng = RngStream::new(seed);
    let psi = random_pure_state(config.dim, &mut rng);
    let tau = random_full_rank_state(config.dim, &mut rng);
    let sigma = StateModel::new(psi.clone(), config.q, tau)?.realized();
    let full = povms.last().expect("non-empty basis range");
    let record = if config.noiseless {
        MeasurementRecord::noiseless(full, &sigma)?
    } else {
        sample_record_with(full, &sigma, config.shots(), config.noise_scale, &mut rng)?
    };

    povms
        .iter()
        .map(|povm| {
            let sub = record.prefix(povm.n_bases(), config.noise_scale);
            config
                .estimators
                .iter()
                .map(|&kind| {
                    let spec = EstimatorSpec::for_kind(kind, sub.noise_bound);
                    match estimate(povm, &sub, &spec) {
                        Ok(fit) => infidelity(&psi, &fit.rho_hat).map(Some),
                        Err(QstError::Infeasible(_)) => Ok(None),
                        Err(e) => Err(e),
                    }
                })
                .collect()
        })
        .collect()
}

/// Mean infidelity to the pure target, with standard errors, for each
/// estimator and basis count in the configured range. All targets share one
/// nested basis sequence, the same one a sweep with this seed and dimension
/// uses. Each target's record is sampled once for the largest basis count
/// and truncated for the smaller ones.
pub fn run_noisy_protocol(config: &NoisyProtocolConfig, exec: Execution) -> Result<NoisyProtocolResult> {
    config.validate()?;
    let root = dimension_stream(config.seed, config.dim);
    let mut basis_rng = root.split(0);
    let bases = BasisSet::random(config.basis_type, config.dim, config.max_bases, &mut basis_rng)?;
    let povms: Vec<PovmMap> = (config.min_bases..=config.max_bases)
        .map(|k| PovmMap::from_bases(&bases.prefix(k)))
        .collect();
    let target_stream = root.split(TARGET_STREAM);
    let target_seeds: Vec<u64> = (0..config.n_targets)
        .map(|i| target_stream.split(i as u64).seed())
        .collect();

    let per_target = map_indexed(target_seeds.len(), exec, |i| run_target(config, &povms, target_seeds[i]))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let mut curves = Vec::new();
    for (e, &estimator) in config.estimators.iter().enumerate() {
        for (j, povm) in povms.iter().enumerate() {
            let samples: Vec<Option<f64>> = per_target.iter().map(|t| t[j][e]).collect();
            let valid: Vec<f64> = samples.iter().flatten().copied().collect();
            let (mean_infidelity, stderr) = mean_and_stderr(&valid);
            curves.push(CurvePoint {
                n_bases: povm.n_bases(),
                estimator,
                mean_infidelity,
                stderr,
                samples,
            });
        }
    }

    Ok(NoisyProtocolResult {
        config: config.clone(),
        shots_per_basis: config.shots(),
        basis_seed: basis_rng.seed(),
        target_seeds,
        curves,
    })
}
