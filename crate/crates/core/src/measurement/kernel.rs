use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::povm::PovmMap;
use crate::linalg::{signature, ComplexMatrix, C64};
use crate::par::{map_indexed, Execution};
use crate::rng::RngStream;
use crate::tolerances::Tolerances;

/// Orthonormal (Hilbert-Schmidt) generalized Gell-Mann basis of `d × d`
/// Hermitian matrices, `d²` elements in this order:
///
/// 1. `I / √d`;
/// 2. diagonal elements `l = 1..d-1`: `(Σ_{j<l} E_jj - l E_ll) / √(l(l+1))`;
/// 3. for each pair `j < k` in lexicographic order, the symmetric
///    `(E_jk + E_kj)/√2` followed by the antisymmetric `-i(E_jk - E_kj)/√2`.
pub fn gell_mann_basis(d: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(d * d);
    out.push(ComplexMatrix::identity(d).scale(1.0 / (d as f64).sqrt()));
    for l in 1..d {
        let norm = ((l * (l + 1)) as f64).sqrt();
        let diag: Vec<f64> = (0..d)
            .map(|j| match j.cmp(&l) {
                std::cmp::Ordering::Less => 1.0 / norm,
                std::cmp::Ordering::Equal => -(l as f64) / norm,
                std::cmp::Ordering::Greater => 0.0,
            })
            .collect();
        out.push(ComplexMatrix::from_real_diagonal(&diag));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..d {
        for k in (j + 1)..d {
            out.push(ComplexMatrix::from_fn(d, |r, c| {
                if (r, c) == (j, k) || (r, c) == (k, j) {
                    C64::new(s, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }));
            out.push(ComplexMatrix::from_fn(d, |r, c| {
                if (r, c) == (j, k) {
                    C64::new(0.0, -s)
                } else if (r, c) == (k, j) {
                    C64::new(0.0, s)
                } else {
                    C64::new(0.0, 0.0)
                }
            }));
        }
    }
    out
}

/// Real `m × d²` matrix of the map in the Gell-Mann basis:
/// entry `(μ, j)` is `Tr(E_μ G_j)`.
pub fn map_matrix(povm: &PovmMap) -> DMatrix<f64> {
    let d = povm.dim();
    let basis = gell_mann_basis(d);
    let mut a = DMatrix::<f64>::zeros(povm.n_outcomes(), d * d);
    for (j, g) in basis.iter().enumerate() {
        let col = povm.apply_map(g).expect("Gell-Mann elements are Hermitian");
        for (mu, v) in col.into_iter().enumerate() {
            a[(mu, j)] = v;
        }
    }
    a
}

fn padded_svd(a: &DMatrix<f64>) -> nalgebra::SVD<f64, nalgebra::Dyn, nalgebra::Dyn> {
    let n = a.ncols();
    let square = if a.nrows() < n {
        let mut p = DMatrix::<f64>::zeros(n, n);
        p.rows_mut(0, a.nrows()).copy_from(a);
        p
    } else {
        a.clone()
    };
    square.svd(false, true)
}

/// Number of singular values above `rel_tol * σ_max`.
pub fn numerical_rank(a: &DMatrix<f64>, rel_tol: f64) -> usize {
    let s = a.singular_values();
    let smax = s.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * smax).count()
}

/// Kernel of a measurement map and a randomized signature scan over it.
#[derive(Debug, Clone)]
pub struct KernelReport {
    pub rank: usize,
    pub kernel_dimension: usize,
    /// Orthonormal (Frobenius) traceless Hermitian matrices spanning the kernel.
    pub kernel_basis: Vec<ComplexMatrix>,
    /// `(n₊, n₋)` of each probe, in probe order.
    pub sampled_signatures: Vec<(usize, usize)>,
    /// Probe with `min(n₊, n₋) ≤ r`: the map is not rank-r strictly complete.
    pub strict_witness: Option<ComplexMatrix>,
    /// Probe with `max(n₊, n₋) ≤ r`: the map is not rank-r complete.
    pub completeness_witness: Option<ComplexMatrix>,
}

impl KernelReport {
    /// True when some probe falsified rank-r strict completeness. A `false`
    /// here certifies nothing.
    pub fn strictly_complete_falsified(&self) -> bool {
        self.strict_witness.is_some()
    }

    pub fn complete_falsified(&self) -> bool {
        self.completeness_witness.is_some()
    }
}

/// Null space of the map plus `n_probes` random unit-Frobenius kernel
/// elements checked against the signature conditions for rank `r`.
///
/// Probe `i` draws from `rng.split(i)`, so results do not depend on the
/// execution strategy.
pub fn kernel_analysis(
    povm: &PovmMap,
    r: usize,
    n_probes: usize,
    rng: &RngStream,
    exec: Execution,
) -> KernelReport {
    let d = povm.dim();
    let a = map_matrix(povm);
    let svd = padded_svd(&a);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = Tolerances::DEFAULT.null_space * smax;
    let v_t = svd.v_t.expect("requested V^T");
    let gm = gell_mann_basis(d);
    let mut kernel_basis = Vec::new();
    for (idx, &s) in svd.singular_values.iter().enumerate() {
        if s <= cutoff {
            let coeffs = v_t.row(idx);
            let k = gm
                .iter()
                .zip(coeffs.iter())
                .fold(ComplexMatrix::zeros(d), |acc, (g, &c)| acc.add_scaled(c, g));
            kernel_basis.push(k.hermitian_part());
        }
    }
    let rank = d * d - kernel_basis.len();

    let probes: Vec<(ComplexMatrix, (usize, usize))> = if kernel_basis.is_empty() {
        Vec::new()
    } else {
        map_indexed(n_probes, exec, |i| {
            let mut stream = rng.split(i as u64);
            let coeffs: Vec<f64> = (0..kernel_basis.len())
                .map(|_| stream.sample::<f64, _>(StandardNormal))
                .collect();
            let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
            let k = kernel_basis
                .iter()
                .zip(&coeffs)
                .fold(ComplexMatrix::zeros(d), |acc, (b, &c)| acc.add_scaled(c / norm, b))
                .hermitian_part();
            let sig = signature(&k, None).expect("Hermitian probe");
            (k, sig)
        })
    };

    let strict_witness = probes
        .iter()
        .find(|(_, (p, n))| (*p).min(*n) <= r)
        .map(|(k, _)| k.clone());
    let completeness_witness = probes
        .iter()
        .find(|(_, (p, n))| (*p).max(*n) <= r)
        .map(|(k, _)| k.clone());

    KernelReport {
        rank,
        kernel_dimension: kernel_basis.len(),
        kernel_basis,
        sampled_signatures: probes.into_iter().map(|(_, s)| s).collect(),
        strict_witness,
        completeness_witness,
    }
}
