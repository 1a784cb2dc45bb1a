//! Maximum likelihood by the diluted fixed-point iteration
//! `ρ ← N[(I + δR) ρ (I + δR)]`, `R = Σ_μ (f_μ / p_μ) E_μ`.
//!
//! Multiplicative updates shrink spurious eigenvalues only like `1/t` when the
//! optimum is rank deficient, which is the typical case for noiseless data from
//! near-pure states. The fixed-point phase is therefore followed by an
//! accelerated projected-gradient phase over unit-trace PSD matrices, which
//! zeroes those eigenvalues exactly and converges linearly near such optima.
//! Both phases only ever accept steps that do not lower the likelihood.

use super::{EstimatorSpec, Fit};
use crate::error::{QstError, Result};
use crate::linalg::spectral::eigh_unchecked;
use crate::linalg::ComplexMatrix;
use crate::measurement::PovmMap;
use crate::tolerances::Tolerances;

/// Record frequencies reweighted into POVM outcome frequencies summing to one.
fn outcome_frequencies(povm: &PovmMap, data: &[f64]) -> Result<Vec<f64>> {
    if let Some(bad) = data.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(QstError::InvalidRecord(format!(
            "likelihood needs non-negative frequencies, found {bad}"
        )));
    }
    let d = povm.dim();
    let weighted: Vec<f64> = data
        .iter()
        .enumerate()
        .map(|(mu, v)| v * povm.weights()[mu / d])
        .collect();
    let total: f64 = weighted.iter().sum();
    if total <= 0.0 {
        return Err(QstError::InvalidRecord("all frequencies are zero".into()));
    }
    Ok(weighted.into_iter().map(|v| v / total).collect())
}

/// Model outcome probabilities `Tr(E_μ ρ)`, floored.
fn model_probabilities(povm: &PovmMap, rho: &ComplexMatrix) -> Vec<f64> {
    let d = povm.dim();
    let floor = Tolerances::DEFAULT.probability_floor;
    povm.basis_probabilities(rho)
        .into_iter()
        .enumerate()
        .map(|(mu, p)| (p * povm.weights()[mu / d]).max(floor))
        .collect()
}

fn log_likelihood_weighted(freqs: &[f64], probs: &[f64]) -> f64 {
    freqs
        .iter()
        .zip(probs)
        .filter(|(f, _)| **f > 0.0)
        .map(|(f, p)| f * p.ln())
        .sum()
}

/// `Σ_μ f_μ log Tr(E_μ ρ)` with record frequencies reweighted to sum to one.
pub fn log_likelihood(povm: &PovmMap, data: &[f64], rho: &ComplexMatrix) -> Result<f64> {
    let freqs = outcome_frequencies(povm, data)?;
    Ok(log_likelihood_weighted(&freqs, &model_probabilities(povm, rho)))
}

pub(crate) fn max_likelihood_fit(povm: &PovmMap, data: &[f64], spec: &EstimatorSpec) -> Result<Fit> {
    let freqs = outcome_frequencies(povm, data)?;
    let d = povm.dim();
    let identity = ComplexMatrix::identity(d);

    let mut rho = identity.scale(1.0 / d as f64);
    let mut probs = model_probabilities(povm, &rho);
    let mut ll = log_likelihood_weighted(&freqs, &probs);
    let mut trace = vec![ll];
    let mut dilution = spec.initial_dilution;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < spec.max_iterations {
        let ratios: Vec<f64> = freqs
            .iter()
            .zip(&probs)
            .enumerate()
            .map(|(mu, (f, p))| povm.weights()[mu / d] * f / p)
            .collect();
        let r = povm.basis_adjoint(&ratios);
        let stationarity = (&(&r - &identity) * &rho).frobenius_norm();
        if stationarity < spec.convergence_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let mut delta = (2.0 * dilution).min(spec.initial_dilution);
        let accepted = loop {
            let m = identity.add_scaled(delta, &r);
            let cand = (&(&m * &rho) * &m).hermitian_part();
            let cand = cand.scale(1.0 / cand.trace().re);
            let cand_probs = model_probabilities(povm, &cand);
            let cand_ll = log_likelihood_weighted(&freqs, &cand_probs);
            if cand_ll >= ll {
                break Some((cand, cand_probs, cand_ll));
            }
            delta *= spec.dilution_backtrack;
            if delta < 1e-14 {
                break None;
            }
        };
        match accepted {
            Some((cand, cand_probs, cand_ll)) => {
                rho = cand;
                probs = cand_probs;
                ll = cand_ll;
                dilution = delta;
                trace.push(ll);
            }
            None => break,
        }
    }

    if spec.likelihood_refinement {
        let polished = refine(povm, &freqs, rho, ll, spec, &mut trace);
        rho = polished.0;
        iterations += polished.1;
        converged = polished.2;
    }

    Ok(Fit {
        x: rho,
        iterations,
        converged,
        objective_trace: trace,
    })
}

/// Gradient of the log-likelihood, `R(ρ)` for the weighted outcome model.
fn likelihood_gradient(povm: &PovmMap, freqs: &[f64], probs: &[f64]) -> ComplexMatrix {
    let d = povm.dim();
    let ratios: Vec<f64> = freqs
        .iter()
        .zip(probs)
        .enumerate()
        .map(|(mu, (f, p))| povm.weights()[mu / d] * f / p)
        .collect();
    povm.basis_adjoint(&ratios)
}

/// Euclidean projection onto `{ρ ⪰ 0, Tr ρ = 1}`: eigenvalues go to the simplex.
fn project_unit_trace(a: &ComplexMatrix) -> ComplexMatrix {
    let eig = eigh_unchecked(a);
    let mut cumulative = 0.0;
    let mut shift = 0.0;
    for (j, lambda) in eig.eigenvalues.iter().enumerate() {
        cumulative += lambda;
        let candidate = (cumulative - 1.0) / (j + 1) as f64;
        if lambda - candidate > 0.0 {
            shift = candidate;
        }
    }
    eig.reconstruct_with(|lambda| (lambda - shift).max(0.0))
}

/// True when some outcome with positive frequency has (numerically) zero
/// model probability, i.e. the point is outside the likelihood's domain.
fn off_domain(povm: &PovmMap, freqs: &[f64], x: &ComplexMatrix) -> bool {
    let d = povm.dim();
    let floor = Tolerances::DEFAULT.probability_floor;
    povm.basis_probabilities(x)
        .iter()
        .enumerate()
        .any(|(mu, p)| freqs[mu] > 0.0 && p * povm.weights()[mu / d] <= floor)
}

/// `ℓ(b) - ℓ(a)` evaluated term by term with `ln_1p`, accurate even when the
/// two likelihoods agree to many digits.
fn likelihood_gain(freqs: &[f64], from: &[f64], to: &[f64]) -> f64 {
    freqs
        .iter()
        .zip(from.iter().zip(to))
        .filter(|(f, _)| **f > 0.0)
        .map(|(f, (a, b))| f * ((b - a) / a).ln_1p())
        .sum()
}

struct Point {
    x: ComplexMatrix,
    probs: Vec<f64>,
    grad: ComplexMatrix,
}

impl Point {
    fn at(povm: &PovmMap, freqs: &[f64], x: ComplexMatrix) -> Self {
        let probs = model_probabilities(povm, &x);
        let grad = likelihood_gradient(povm, freqs, &probs);
        Point { x, probs, grad }
    }
}

/// Accelerated projected gradient ascent with backtracking and monotone
/// restarts. The flag in the result reports whether the gradient mapping
/// fell below the tolerance.
fn refine(
    povm: &PovmMap,
    freqs: &[f64],
    start: ComplexMatrix,
    start_ll: f64,
    spec: &EstimatorSpec,
    trace: &mut Vec<f64>,
) -> (ComplexMatrix, usize, bool) {
    let mut x_ll = start_ll;
    let mut x = Point::at(povm, freqs, start);
    let mut y = Point::at(povm, freqs, x.x.clone());
    let mut y_is_x = true;
    let mut momentum = 1.0_f64;
    let mut step = 1.0_f64;
    let mut stalled = 0;

    for iteration in 1..=spec.max_iterations {
        step *= 2.0;
        let (z, z_probs, gradient_mapping) = loop {
            let z = project_unit_trace(&y.x.add_scaled(step, &y.grad));
            let z_probs = model_probabilities(povm, &z);
            let diff = &z - &y.x;
            let diff_norm = diff.frobenius_norm();
            let gain = likelihood_gain(freqs, &y.probs, &z_probs);
            let model = y.grad.inner_re(&diff) - diff_norm * diff_norm / (2.0 * step);
            if gain >= model || step < 1e-20 {
                break (z, z_probs, diff_norm / step);
            }
            step *= 0.5;
        };

        let gain = likelihood_gain(freqs, &x.probs, &z_probs);
        if gain < 0.0 || (gain == 0.0 && !y_is_x) {
            // Momentum overshot: restart from the last accepted point.
            momentum = 1.0;
            y = Point::at(povm, freqs, x.x.clone());
            y_is_x = true;
            stalled += 1;
            if stalled > 50 {
                return (x.x, iteration, false);
            }
            continue;
        }

        let next_momentum = 0.5 * (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt());
        let beta = (momentum - 1.0) / next_momentum;
        let extrapolated = z.add_scaled(beta, &(&z - &x.x));
        momentum = next_momentum;
        x_ll += gain;
        trace.push(x_ll);
        x = Point::at(povm, freqs, z);

        if gradient_mapping < spec.convergence_tol {
            return (x.x, iteration, true);
        }
        stalled = if gain <= 0.0 { stalled + 1 } else { 0 };
        if stalled > 50 {
            return (x.x, iteration, false);
        }
        y_is_x = !(beta > 0.0 && !off_domain(povm, freqs, &extrapolated));
        y = if y_is_x {
            Point::at(povm, freqs, x.x.clone())
        } else {
            Point::at(povm, freqs, extrapolated)
        };
    }
    (x.x, spec.max_iterations, false)
}
