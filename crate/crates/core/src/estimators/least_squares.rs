//! Accelerated projected gradient for PSD-constrained least squares.

use super::{residual_vector, EstimatorSpec, Fit};
use crate::error::{QstError, Result};
use crate::linalg::{psd_project_decomposed, ComplexMatrix};
use crate::measurement::PovmMap;

fn half_sq(v: &[f64]) -> f64 {
    0.5 * v.iter().map(|x| x * x).sum::<f64>()
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `L ‖X - P(X - ∇F(X)/L)‖_F`, the norm of the projected gradient of
/// `F(X) = ½‖A[X] - f‖²` at `X`.
pub fn projected_gradient_norm(povm: &PovmMap, data: &[f64], x: &ComplexMatrix) -> f64 {
    let l = povm.basis_lipschitz();
    let grad = povm.basis_adjoint(&residual_vector(povm, x, data));
    let (p, _) = psd_project_decomposed(&x.add_scaled(-1.0 / l, &grad));
    l * x.distance(&p)
}

/// Maximally mixed start scaled to the trace the data imply.
pub(crate) fn initial_point(povm: &PovmMap, data: &[f64]) -> ComplexMatrix {
    let d = povm.dim();
    let k = povm.n_bases().max(1);
    let trace = (data.iter().sum::<f64>() / k as f64).max(0.0);
    let trace = if trace > 0.0 { trace } else { 1.0 };
    ComplexMatrix::identity(d).scale(trace / d as f64)
}

/// FISTA with step `1/L` and a restart whenever the objective would
/// increase. With `target` set, stops as soon as the residual norm drops
/// to `target`.
pub(crate) fn least_squares_fit(povm: &PovmMap, data: &[f64], spec: &EstimatorSpec, target: Option<f64>) -> Fit {
    let lipschitz = povm.basis_lipschitz();
    let step = 1.0 / lipschitz;
    let floor = spec.objective_floor * half_sq(data).max(f64::MIN_POSITIVE);

    let mut x = initial_point(povm, data);
    let mut ax = povm.basis_probabilities(&x);
    let mut f = half_sq(&diff(&ax, data));
    let mut y = x.clone();
    let mut ay = ax.clone();
    let mut t = 1.0f64;
    let mut trace = vec![f];
    let mut converged = false;
    let mut iterations = 0;

    let reached = |ax: &[f64], f: f64| match target {
        Some(eps) => spec.norm.of(&diff(ax, data)) <= eps,
        None => f <= floor,
    };
    if reached(&ax, f) {
        return Fit {
            x,
            iterations,
            converged: true,
            objective_trace: trace,
        };
    }

    while iterations < spec.max_iterations {
        iterations += 1;
        let grad = povm.basis_adjoint(&diff(&ay, data));
        let (x_next, _) = psd_project_decomposed(&y.add_scaled(-step, &grad));
        let ax_next = povm.basis_probabilities(&x_next);
        let f_next = half_sq(&diff(&ax_next, data));

        if f_next > f && t > 1.0 {
            // momentum overshot: restart from the last accepted point
            t = 1.0;
            y = x.clone();
            ay = ax.clone();
            continue;
        }

        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_next;
        y = x_next.add_scaled(beta, &(&x_next - &x));
        ay = ax_next
            .iter()
            .zip(&ax)
            .map(|(a, b)| a + beta * (a - b))
            .collect();
        let rel_change = (f - f_next).abs() / f.max(f64::MIN_POSITIVE);
        x = x_next;
        ax = ax_next;
        f = f_next;
        t = t_next;
        trace.push(f);

        if reached(&ax, f) || f <= floor {
            converged = true;
            break;
        }
        if rel_change < spec.convergence_tol
            && projected_gradient_norm(povm, data, &x) <= 10.0 * spec.convergence_tol * lipschitz
        {
            converged = true;
            break;
        }
    }

    Fit {
        x,
        iterations,
        converged,
        objective_trace: trace,
    }
}

/// Least squares with early exit once `‖A[X] - f‖ ≤ ε`; `ε = 0` is read as
/// equality to within `1e-10`.
pub(crate) fn feasibility_fit(povm: &PovmMap, data: &[f64], spec: &EstimatorSpec) -> Result<Fit> {
    let eps = spec.noise_bound_or_zero().max(1e-10);
    let fit = least_squares_fit(povm, data, spec, Some(eps));
    let residual = spec.norm.of(&residual_vector(povm, &fit.x, data));
    if residual > eps {
        return Err(QstError::Infeasible(format!(
            "residual floor {residual:.3e} exceeds noise bound {eps:.3e}"
        )));
    }
    Ok(Fit {
        converged: true,
        ..fit
    })
}
