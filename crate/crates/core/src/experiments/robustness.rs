use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{QstError, Result};
use crate::estimators::{estimate_from_data, EstimatorKind, EstimatorSpec};
use crate::measurement::{BasisSet, BasisType, PovmMap};
use crate::par::{map_indexed, Execution};
use crate::quantum::random_rank_r_state;
use crate::rng::RngStream;

fn default_epsilons() -> Vec<f64> {
    (0..=8).map(|i| 1e-4 * 10f64.powf(i as f64 / 4.0)).collect()
}
fn default_trials() -> usize {
    5
}
fn default_estimator() -> EstimatorKind {
    EstimatorKind::TraceMin
}
fn default_slack() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobustnessConfig {
    pub dim: usize,
    pub rank: usize,
    pub n_bases: usize,
    pub basis_type: BasisType,
    #[serde(default = "default_epsilons")]
    pub epsilons: Vec<f64>,
    #[serde(default = "default_trials")]
    pub n_trials: usize,
    /// Program run on the perturbed data; ball-constrained programs get the
    /// injected noise norm as their radius.
    #[serde(default = "default_estimator")]
    pub estimator: EstimatorKind,
    /// Relative allowance on top of `2 Ĉ ε` when checking the error bound.
    #[serde(default = "default_slack")]
    pub bound_slack: f64,
    pub seed: u64,
}

impl RobustnessConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(QstError::InvalidConfig(msg));
        if self.dim < 2 {
            return bad(format!("dimension {} is below 2", self.dim));
        }
        if self.rank == 0 || self.rank > self.dim {
            return bad(format!("rank {} is invalid for dimension {}", self.rank, self.dim));
        }
        if self.n_bases == 0 {
            return bad("n_bases must be positive".into());
        }
        if self.basis_type == BasisType::Custom {
            return bad("basis_type must be global or local".into());
        }
        if self.epsilons.iter().filter(|&&e| e > 0.0).count() < 2 {
            return bad("at least two positive noise levels are needed for a slope".into());
        }
        if let Some(e) = self.epsilons.iter().find(|e| !(e.is_finite() && **e >= 0.0)) {
            return bad(format!("noise level {e} must be finite and non-negative"));
        }
        if self.n_trials == 0 {
            return bad("n_trials must be positive".into());
        }
        if !(self.bound_slack >= 0.0) {
            return bad("bound_slack must be non-negative".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessPoint {
    pub epsilon: f64,
    /// Mean of `‖X̂ - ρ₀‖_F` over trials.
    pub mean_error: f64,
    pub max_error: f64,
    pub errors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessScan {
    pub config: RobustnessConfig,
    pub points: Vec<RobustnessPoint>,
    /// Least-squares slope of `log mean_error` against `log ε` over ε > 0.
    pub slope: f64,
    pub intercept: f64,
    /// Empirical constant: geometric mean of `mean_error / ε` over ε > 0.
    pub c_hat: f64,
    /// Whether every point with ε > 0 satisfies
    /// `mean_error ≤ 2 Ĉ ε (1 + bound_slack)`.
    pub bound_holds: bool,
    /// `error(2ε) / error(ε)` at the middle positive noise level.
    pub doubling_ratio: f64,
}

/// Least-squares line through `(x, y)`; returns `(slope, intercept)`.
fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

fn unit_direction(len: usize, rng: &mut RngStream) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..len).map(|_| StandardNormal.sample(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Exact data for one trial and its fixed noise direction.
struct Trial {
    truth: crate::linalg::ComplexMatrix,
    exact: Vec<f64>,
    direction: Vec<f64>,
}

fn trial_error(povm: &PovmMap, trial: &Trial, kind: EstimatorKind, epsilon: f64) -> Result<f64> {
    let data: Vec<f64> = trial
        .exact
        .iter()
        .zip(&trial.direction)
        .map(|(p, u)| p + epsilon * u)
        .collect();
    let spec = EstimatorSpec::for_kind(kind, Some(epsilon));
    let fit = estimate_from_data(povm, &data, &spec)?;
    Ok(fit.x_hat.distance(&trial.truth))
}

/// Perturbs exact records by noise of norm exactly ε in a uniformly random
/// direction and fits how the estimation error scales with ε. Each trial
/// keeps its state and noise direction across all ε.
pub fn run_robustness_scan(config: &RobustnessConfig, exec: Execution) -> Result<RobustnessScan> {
    config.validate()?;
    let root = RngStream::new(config.seed);
    let bases = BasisSet::random(config.basis_type, config.dim, config.n_bases, &mut root.split(0))?;
    let povm = PovmMap::from_bases(&bases);
    let trial_stream = root.split(1);
    let trials = (0..config.n_trials)
        .map(|i| {
            let mut rng = trial_stream.split(i as u64);
            let state = random_rank_r_state(config.dim, config.rank, &mut rng)?;
            let exact = povm.basis_probabilities(state.rho());
            let direction = unit_direction(exact.len(), &mut rng);
            Ok(Trial {
                truth: state.rho().clone(),
                exact,
                direction,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut positive: Vec<f64> = config.epsilons.iter().copied().filter(|&e| e > 0.0).collect();
    positive.sort_by(f64::total_cmp);
    let middle = positive[positive.len() / 2];
    let mut levels = config.epsilons.clone();
    levels.push(2.0 * middle);

    let jobs = levels.len() * trials.len();
    let errors = map_indexed(jobs, exec, |j| {
        trial_error(&povm, &trials[j % trials.len()], config.estimator, levels[j / trials.len()])
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut per_level = errors.chunks(trials.len()).map(|c| c.to_vec());

    let points: Vec<RobustnessPoint> = config
        .epsilons
        .iter()
        .map(|&epsilon| {
            let errors = per_level.next().expect("one chunk per level");
            RobustnessPoint {
                epsilon,
                mean_error: errors.iter().sum::<f64>() / errors.len() as f64,
                max_error: errors.iter().cloned().fold(0.0, f64::max),
                errors,
            }
        })
        .collect();
    let doubled = per_level.next().expect("doubling level");
    let doubled_mean = doubled.iter().sum::<f64>() / doubled.len() as f64;
    let middle_mean = points
        .iter()
        .find(|p| p.epsilon == middle)
        .map(|p| p.mean_error)
        .expect("middle level is scanned");

    let fitted: Vec<&RobustnessPoint> = points.iter().filter(|p| p.epsilon > 0.0).collect();
    let log_eps: Vec<f64> = fitted.iter().map(|p| p.epsilon.ln()).collect();
    let log_err: Vec<f64> = fitted.iter().map(|p| p.mean_error.ln()).collect();
    let (slope, intercept) = fit_line(&log_eps, &log_err);
    let c_hat = (log_err.iter().zip(&log_eps).map(|(e, x)| e - x).sum::<f64>() / fitted.len() as f64).exp();
    let bound_holds = fitted
        .iter()
        .all(|p| p.mean_error <= 2.0 * c_hat * p.epsilon * (1.0 + config.bound_slack));

    Ok(RobustnessScan {
        config: config.clone(),
        points,
        slope,
        intercept,
        c_hat,
        bound_holds,
        doubling_ratio: doubled_mean / middle_mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_fit_recovers_exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v - 1.0).collect();
        let (s, c) = fit_line(&x, &y);
        assert!((s - 2.0).abs() < 1e-14 && (c + 1.0).abs() < 1e-14);
    }

    #[test]
    fn directions_have_unit_norm() {
        let u = unit_direction(17, &mut RngStream::new(4));
        let n: f64 = u.iter().map(|x| x * x).sum();
        assert!((n - 1.0).abs() < 1e-14);
    }

    #[test]
    fn small_scan_is_linear() {
        let cfg = RobustnessConfig {
            dim: 3,
            rank: 1,
            n_bases: 4,
            basis_type: BasisType::Global,
            epsilons: vec![0.0, 1e-4, 1e-3, 1e-2],
            n_trials: 2,
            estimator: EstimatorKind::LeastSquares,
            bound_slack: 0.1,
            seed: 3,
        };
        let scan = run_robustness_scan(&cfg, Execution::Sequential).unwrap();
        assert!(scan.points[0].mean_error < 1e-5);
        assert!((scan.slope - 1.0).abs() < 0.15, "slope {}", scan.slope);
        assert!(scan.c_hat > 0.0);
    }
}
