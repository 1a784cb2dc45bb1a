//! ADMM for `min Tr X` s.t. `‖A[X] - f‖₂ ≤ ε`, `X ⪰ 0`.
//!
//! Splitting: `X` is a free Hermitian copy, `Y` carries the PSD constraint
//! and the trace objective, `z` carries the data ball. With `Â = A/√L` the
//! updates are
//!
//! ```text
//! X ← (I + Â†Â)⁻¹ (Y - U + Â†(z - w))       (conjugate gradient)
//! Y ← P_psd(X + U - I/ρ)
//! z ← s f + Π_{‖·‖ ≤ s ε}(ÂX + w - s f)
//! U ← U + X - Y,   w ← w + ÂX - z
//! ```
//!
//! where `s = 1/√L` and `U`, `w` are scaled duals.

use super::least_squares::initial_point;
use super::{EstimatorSpec, Fit};
use crate::error::{QstError, Result};
use crate::linalg::{psd_project_decomposed, ComplexMatrix};
use crate::measurement::PovmMap;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

struct ScaledMap<'a> {
    povm: &'a PovmMap,
    s: f64,
}

impl ScaledMap<'_> {
    fn forward(&self, x: &ComplexMatrix) -> Vec<f64> {
        self.povm
            .basis_probabilities(x)
            .into_iter()
            .map(|v| v * self.s)
            .collect()
    }

    fn adjoint(&self, r: &[f64]) -> ComplexMatrix {
        let scaled: Vec<f64> = r.iter().map(|v| v * self.s).collect();
        self.povm.basis_adjoint(&scaled)
    }

    /// `X + Â†Â X`.
    fn normal(&self, x: &ComplexMatrix) -> ComplexMatrix {
        x + &self.adjoint(&self.forward(x))
    }

    /// Conjugate gradient on `(I + Â†Â) X = rhs`, warm-started at `x0`.
    /// The operator spectrum lies in `[1, 2]`, so a few steps suffice.
    fn solve_normal(&self, rhs: &ComplexMatrix, x0: &ComplexMatrix, tol: f64) -> ComplexMatrix {
        let mut x = x0.clone();
        let mut r = rhs - &self.normal(&x);
        let mut p = r.clone();
        let mut rr = r.inner_re(&r);
        let target = (tol * rhs.frobenius_norm().max(1e-300)).powi(2);
        for _ in 0..50 {
            if rr <= target {
                break;
            }
            let ap = self.normal(&p);
            let alpha = rr / p.inner_re(&ap);
            x = x.add_scaled(alpha, &p);
            r = r.add_scaled(-alpha, &ap);
            let rr_next = r.inner_re(&r);
            p = r.add_scaled(rr_next / rr, &p);
            rr = rr_next;
        }
        x
    }
}

pub(crate) fn trace_min_fit(povm: &PovmMap, data: &[f64], spec: &EstimatorSpec) -> Result<Fit> {
    let eps = spec.noise_bound_or_zero();
    let d = povm.dim();
    let lipschitz = povm.basis_lipschitz();
    let s = 1.0 / lipschitz.sqrt();
    let map = ScaledMap { povm, s };
    let target: Vec<f64> = data.iter().map(|v| v * s).collect();
    let radius = eps * s;
    let identity = ComplexMatrix::identity(d);

    let mut rho = spec.admm_penalty;
    let mut x = initial_point(povm, data);
    let mut y = x.clone();
    let mut z = map.forward(&x);
    let mut u = ComplexMatrix::zeros(d);
    let mut w = vec![0.0; z.len()];
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let tol = spec.convergence_tol;

    while iterations < spec.max_iterations {
        iterations += 1;

        let zw: Vec<f64> = z.iter().zip(&w).map(|(a, b)| a - b).collect();
        let rhs = &(&y - &u) + &map.adjoint(&zw);
        x = map.solve_normal(&rhs, &x, 1e-13);
        let ax = map.forward(&x);

        let y_prev = y;
        let (y_next, _) = psd_project_decomposed(&(&x + &u).add_scaled(-1.0 / rho, &identity));
        y = y_next;

        let z_prev = z;
        let mut offset: Vec<f64> = ax
            .iter()
            .zip(&w)
            .zip(&target)
            .map(|((a, b), t)| a + b - t)
            .collect();
        let off_norm = norm(&offset);
        if off_norm > radius {
            let shrink = if off_norm > 0.0 { radius / off_norm } else { 0.0 };
            offset.iter_mut().for_each(|v| *v *= shrink);
        }
        z = target.iter().zip(&offset).map(|(t, o)| t + o).collect();

        let primal_x = &x - &y;
        let primal_z: Vec<f64> = ax.iter().zip(&z).map(|(a, b)| a - b).collect();
        u = &u + &primal_x;
        w.iter_mut().zip(&primal_z).for_each(|(wi, r)| *wi += r);

        let dz: Vec<f64> = z.iter().zip(&z_prev).map(|(a, b)| a - b).collect();
        let dual_vec = &(&y - &y_prev) + &map.adjoint(&dz);
        let r_primal = (primal_x.inner_re(&primal_x) + primal_z.iter().map(|v| v * v).sum::<f64>()).sqrt();
        let r_dual = rho * dual_vec.frobenius_norm();

        trace.push(y.trace().re);

        let dual_norm = rho * (u.inner_re(&u) + w.iter().map(|v| v * v).sum::<f64>()).sqrt();
        if !dual_norm.is_finite() || dual_norm > spec.divergence_threshold {
            return Err(QstError::Infeasible(format!(
                "dual iterates diverged (‖λ‖ = {dual_norm:.3e}) after {iterations} iterations"
            )));
        }

        let scale_p = 1.0f64.max(x.frobenius_norm()).max(y.frobenius_norm()).max(norm(&z));
        let scale_d = 1.0f64.max(rho * (u.frobenius_norm() + map.adjoint(&w).frobenius_norm()));
        if r_primal <= tol * scale_p && r_dual <= tol * scale_d {
            converged = true;
            break;
        }

        if iterations % 10 == 0 {
            if r_primal > 10.0 * r_dual && rho < 1e6 {
                rho *= 2.0;
                u = u.scale(0.5);
                w.iter_mut().for_each(|v| *v *= 0.5);
            } else if r_dual > 10.0 * r_primal && rho > 1e-6 {
                rho *= 0.5;
                u = u.scale(2.0);
                w.iter_mut().for_each(|v| *v *= 2.0);
            }
        }
    }

    Ok(Fit {
        x: y,
        iterations,
        converged,
        objective_trace: trace,
    })
}
