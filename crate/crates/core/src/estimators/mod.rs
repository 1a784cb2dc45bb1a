//! PSD-constrained convex estimators.
//!
//! All programs search over unnormalized PSD matrices `X` without a trace
//! constraint; the state estimate is `X̂ / Tr X̂`. Data are compared in record
//! units: for each basis, the vector of `⟨b_i|X|b_i⟩` against the observed
//! outcome frequencies of that basis.

mod least_squares;
mod likelihood;
mod trace_min;

use serde::{Deserialize, Serialize};

use crate::error::{QstError, Result};
use crate::linalg::ComplexMatrix;
use crate::measurement::{MeasurementRecord, PovmMap};
use crate::quantum::QuantumState;

pub use least_squares::projected_gradient_norm;
use least_squares::{feasibility_fit, least_squares_fit};
pub use likelihood::log_likelihood;
use likelihood::max_likelihood_fit;
use trace_min::trace_min_fit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Feasibility,
    LeastSquares,
    TraceMin,
    MaxLikelihood,
}

impl EstimatorKind {
    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::Feasibility => "feasibility",
            EstimatorKind::LeastSquares => "least_squares",
            EstimatorKind::TraceMin => "trace_min",
            EstimatorKind::MaxLikelihood => "max_likelihood",
        }
    }
}

impl std::fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Vector norm used to report data residuals.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResidualNorm {
    L1,
    #[default]
    L2,
    Linf,
}

impl ResidualNorm {
    pub fn of(self, v: &[f64]) -> f64 {
        match self {
            ResidualNorm::L1 => v.iter().map(|x| x.abs()).sum(),
            ResidualNorm::L2 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            ResidualNorm::Linf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSpec {
    pub kind: EstimatorKind,
    pub noise_bound: Option<f64>,
    pub max_iterations: usize,
    pub convergence_tol: f64,
    pub norm: ResidualNorm,
    /// Least squares: stop once `½‖r‖² ≤ objective_floor · ½‖f‖²`.
    pub objective_floor: f64,
    /// Trace minimization: initial ADMM penalty.
    pub admm_penalty: f64,
    /// Trace minimization: unscaled dual norm treated as divergence.
    pub divergence_threshold: f64,
    /// Maximum likelihood: first dilution tried.
    pub initial_dilution: f64,
    /// Maximum likelihood: backtracking factor on the dilution.
    pub dilution_backtrack: f64,
    /// Maximum likelihood: after the diluted iteration stops, polish with
    /// projected gradient ascent over unit-trace PSD matrices.
    #[serde(default = "enabled")]
    pub likelihood_refinement: bool,
}

fn enabled() -> bool {
    true
}

impl EstimatorSpec {
    pub fn least_squares() -> Self {
        Self {
            kind: EstimatorKind::LeastSquares,
            noise_bound: None,
            max_iterations: 20_000,
            convergence_tol: 1e-10,
            norm: ResidualNorm::L2,
            objective_floor: 1e-24,
            admm_penalty: 1.0,
            divergence_threshold: 1e8,
            initial_dilution: 1e3,
            dilution_backtrack: 0.5,
            likelihood_refinement: true,
        }
    }

    pub fn feasibility(noise_bound: f64) -> Self {
        Self {
            kind: EstimatorKind::Feasibility,
            noise_bound: Some(noise_bound),
            ..Self::least_squares()
        }
    }

    pub fn trace_min(noise_bound: f64) -> Self {
        Self {
            kind: EstimatorKind::TraceMin,
            noise_bound: Some(noise_bound),
            convergence_tol: 1e-8,
            ..Self::least_squares()
        }
    }

    pub fn max_likelihood() -> Self {
        Self {
            kind: EstimatorKind::MaxLikelihood,
            convergence_tol: 1e-7,
            ..Self::least_squares()
        }
    }

    pub fn for_kind(kind: EstimatorKind, noise_bound: Option<f64>) -> Self {
        let mut spec = match kind {
            EstimatorKind::LeastSquares => Self::least_squares(),
            EstimatorKind::Feasibility => Self::feasibility(0.0),
            EstimatorKind::TraceMin => Self::trace_min(0.0),
            EstimatorKind::MaxLikelihood => Self::max_likelihood(),
        };
        spec.noise_bound = noise_bound.or(spec.noise_bound);
        spec
    }

    pub fn validate(&self) -> Result<()> {
        if matches!(self.kind, EstimatorKind::TraceMin | EstimatorKind::Feasibility) {
            match self.noise_bound {
                Some(e) if e >= 0.0 && e.is_finite() => {}
                Some(e) => return Err(QstError::InvalidConfig(format!("noise bound {e} must be ≥ 0"))),
                None => {
                    return Err(QstError::InvalidConfig(format!(
                        "{} requires a noise bound",
                        self.kind
                    )))
                }
            }
        }
        if self.max_iterations == 0 {
            return Err(QstError::InvalidConfig("max_iterations must be positive".into()));
        }
        if !(self.convergence_tol > 0.0) {
            return Err(QstError::InvalidConfig("convergence_tol must be positive".into()));
        }
        if !(self.dilution_backtrack > 0.0 && self.dilution_backtrack < 1.0) {
            return Err(QstError::InvalidConfig("dilution_backtrack must lie in (0, 1)".into()));
        }
        Ok(())
    }

    fn noise_bound_or_zero(&self) -> f64 {
        self.noise_bound.unwrap_or(0.0)
    }
}

#[derive(Debug, Clone)]
pub struct EstimateResult {
    pub kind: EstimatorKind,
    /// Unnormalized PSD solution.
    pub x_hat: ComplexMatrix,
    /// `X̂ / Tr X̂`.
    pub rho_hat: QuantumState,
    /// `‖⟨b|X̂|b⟩ - f‖` in the configured norm.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub objective_trace: Vec<f64>,
}

/// Raw solver output before normalization.
pub(crate) struct Fit {
    pub x: ComplexMatrix,
    pub iterations: usize,
    pub converged: bool,
    pub objective_trace: Vec<f64>,
}

pub(crate) fn residual_vector(povm: &PovmMap, x: &ComplexMatrix, data: &[f64]) -> Vec<f64> {
    povm.basis_probabilities(x)
        .iter()
        .zip(data)
        .map(|(a, b)| a - b)
        .collect()
}

pub(crate) fn finish(
    kind: EstimatorKind,
    povm: &PovmMap,
    data: &[f64],
    norm: ResidualNorm,
    fit: Fit,
) -> Result<EstimateResult> {
    let rho_hat = QuantumState::from_unnormalized(&fit.x)?;
    let residual = norm.of(&residual_vector(povm, &fit.x, data));
    Ok(EstimateResult {
        kind,
        x_hat: fit.x,
        rho_hat,
        residual,
        iterations: fit.iterations,
        converged: fit.converged,
        objective_trace: fit.objective_trace,
    })
}

fn check_data(povm: &PovmMap, data: &[f64]) -> Result<()> {
    if data.len() != povm.n_outcomes() {
        return Err(QstError::DimensionMismatch {
            expected: povm.n_outcomes(),
            found: data.len(),
        });
    }
    Ok(())
}

/// Runs the estimator selected by `spec.kind` on raw record-unit data.
///
/// `data` need not be a valid probability vector, which lets callers inject
/// arbitrary synthetic noise.
pub fn estimate_from_data(povm: &PovmMap, data: &[f64], spec: &EstimatorSpec) -> Result<EstimateResult> {
    spec.validate()?;
    check_data(povm, data)?;
    let fit = match spec.kind {
        EstimatorKind::LeastSquares => least_squares_fit(povm, data, spec, None),
        EstimatorKind::Feasibility => feasibility_fit(povm, data, spec)?,
        EstimatorKind::TraceMin => trace_min_fit(povm, data, spec)?,
        EstimatorKind::MaxLikelihood => max_likelihood_fit(povm, data, spec)?,
    };
    finish(spec.kind, povm, data, spec.norm, fit)
}

pub fn estimate(povm: &PovmMap, record: &MeasurementRecord, spec: &EstimatorSpec) -> Result<EstimateResult> {
    record.check_compatible(povm)?;
    estimate_from_data(povm, &record.values, spec)
}

fn with_kind(spec: &EstimatorSpec, kind: EstimatorKind) -> EstimatorSpec {
    EstimatorSpec {
        kind,
        ..spec.clone()
    }
}

/// `argmin ½‖A[X] - f‖₂²` over `X ⪰ 0`.
pub fn estimate_least_squares(
    povm: &PovmMap,
    record: &MeasurementRecord,
    spec: &EstimatorSpec,
) -> Result<EstimateResult> {
    estimate(povm, record, &with_kind(spec, EstimatorKind::LeastSquares))
}

/// `argmin Tr X` subject to `‖A[X] - f‖₂ ≤ ε`, `X ⪰ 0`.
pub fn estimate_trace_min(
    povm: &PovmMap,
    record: &MeasurementRecord,
    spec: &EstimatorSpec,
) -> Result<EstimateResult> {
    estimate(povm, record, &with_kind(spec, EstimatorKind::TraceMin))
}

/// Maximizes `Σ_μ f_μ log Tr(E_μ ρ)` over density matrices.
pub fn estimate_max_likelihood(
    povm: &PovmMap,
    record: &MeasurementRecord,
    spec: &EstimatorSpec,
) -> Result<EstimateResult> {
    estimate(povm, record, &with_kind(spec, EstimatorKind::MaxLikelihood))
}

/// Any `X ⪰ 0` with `‖A[X] - f‖₂ ≤ ε`.
pub fn feasibility(povm: &PovmMap, record: &MeasurementRecord, spec: &EstimatorSpec) -> Result<EstimateResult> {
    estimate(povm, record, &with_kind(spec, EstimatorKind::Feasibility))
}
