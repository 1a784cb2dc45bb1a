//! Numerical studies built on the estimators: the completeness-onset sweep,
//! the noisy near-pure-state protocol and the robustness-versus-noise scan.
//!
//! Every study draws its randomness from child streams of one root seed,
//! indexed by position (dimension, rank, target, trial), so sequential and
//! parallel runs produce identical results.

mod noisy;
mod robustness;
mod sweep;

pub use noisy::{run_noisy_protocol, CurvePoint, NoisyProtocolConfig, NoisyProtocolResult};
pub use robustness::{run_robustness_scan, RobustnessConfig, RobustnessPoint, RobustnessScan};
pub use sweep::{run_completeness_sweep, BasisCountStats, SweepCell, SweepConfig, SweepResult};

use crate::error::Result;
use crate::quantum::{infidelity, QuantumState};
use crate::rng::RngStream;

/// Stream for everything drawn at dimension `dim` under `seed`. Its child 0
/// generates the basis sequence, so sweeps and noisy runs with the same seed
/// measure the same bases.
pub(crate) fn dimension_stream(seed: u64, dim: usize) -> RngStream {
    RngStream::new(seed).split(dim as u64)
}

/// Reconstruction error used to decide whether a rank-`rank` state was
/// recovered: infidelity for pure states, Frobenius distance otherwise.
pub fn reconstruction_error(rank: usize, truth: &QuantumState, estimate: &QuantumState) -> Result<f64> {
    if rank == 1 {
        infidelity(truth, estimate)
    } else {
        Ok(truth.rho().distance(estimate.rho()))
    }
}

/// Error threshold matching an infidelity threshold. For nearby pure states
/// `‖ρ - σ‖_F² ≈ 2(1 - F)`, which fixes the Frobenius threshold for mixed ranks.
pub fn pass_threshold(rank: usize, infidelity_threshold: f64) -> f64 {
    if rank == 1 {
        infidelity_threshold
    } else {
        (2.0 * infidelity_threshold).sqrt()
    }
}

/// Sample mean and standard error of the mean.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}
