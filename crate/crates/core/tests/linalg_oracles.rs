//! Spectral routines checked against constructions that share no code with
//! them. Eigenvalues are compared with roots of the characteristic
//! polynomial; the PSD projection with a descent over explicit factors.

use rand::Rng;
use rand_distr::StandardNormal;
use strictqst::linalg::{eigh, psd_project, signature, ComplexMatrix};
use strictqst::{RngStream, C64};

fn random_hermitian(d: usize, rng: &mut RngStream) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(d, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    g.hermitian_part()
}

/// Coefficients `c_0..c_n` of `det(zI - A)` by the Faddeev–LeVerrier recursion.
fn characteristic_polynomial(a: &ComplexMatrix) -> Vec<C64> {
    let n = a.dim();
    let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
    coeffs[n] = C64::new(1.0, 0.0);
    let mut m = ComplexMatrix::zeros(n);
    for k in 1..=n {
        let shifted = &m + &ComplexMatrix::identity(n).scale_complex(coeffs[n - k + 1]);
        m = a * &shifted;
        coeffs[n - k] = -m.trace() / k as f64;
    }
    coeffs
}

trait ScaleComplex {
    fn scale_complex(&self, s: C64) -> ComplexMatrix;
}

impl ScaleComplex for ComplexMatrix {
    fn scale_complex(&self, s: C64) -> ComplexMatrix {
        let d = self.dim();
        ComplexMatrix::from_fn(d, |i, j| self.get(i, j) * s)
    }
}

/// All roots of a monic polynomial by Durand–Kerner iteration.
fn polynomial_roots(coeffs: &[C64]) -> Vec<C64> {
    let n = coeffs.len() - 1;
    let eval = |z: C64| coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * z + c);
    let seed = C64::new(0.4, 0.9);
    let mut roots: Vec<C64> = (0..n).map(|i| seed.powu(i as u32) * 3.0).collect();
    for _ in 0..5000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let denom = (0..n)
                .filter(|&j| j != i)
                .fold(C64::new(1.0, 0.0), |acc, j| acc * (roots[i] - roots[j]));
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    roots
}

#[test]
fn eigenvalues_match_characteristic_polynomial_roots() {
    let mut rng = RngStream::new(101);
    for trial in 0..40 {
        let d = 2 + trial % 5;
        let a = random_hermitian(d, &mut rng);
        let mut oracle: Vec<f64> = polynomial_roots(&characteristic_polynomial(&a))
            .iter()
            .map(|z| {
                assert!(z.im.abs() < 1e-6, "Hermitian matrix produced complex root {z}");
                z.re
            })
            .collect();
        oracle.sort_by(|x, y| y.total_cmp(x));
        let eig = eigh(&a).unwrap();
        for (got, want) in eig.eigenvalues.iter().zip(&oracle) {
            assert!((got - want).abs() < 1e-7, "d={d}: {got} vs {want}");
        }
        assert!(eig.reconstruct().distance(&a) < 1e-10);
    }
}

/// `min ‖V V† - A‖_F` over `V ∈ C^{d×r}` by gradient descent with
/// backtracking, from several starts; returns the best `V V†`.
fn factored_projection(a: &ComplexMatrix, r: usize, rng: &mut RngStream) -> (f64, ComplexMatrix) {
    let d = a.dim();
    if r == 0 {
        return (a.frobenius_norm(), ComplexMatrix::zeros(d));
    }
    let gram = |v: &[Vec<C64>]| ComplexMatrix::from_fn(d, |i, j| (0..r).map(|c| v[c][i] * v[c][j].conj()).sum());
    let mut best = (f64::INFINITY, ComplexMatrix::zeros(d));
    for _ in 0..4 {
        let mut v: Vec<Vec<C64>> = (0..r)
            .map(|_| (0..d).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect())
            .collect();
        let mut step = 0.05;
        let mut f = gram(&v).distance(a).powi(2);
        for _ in 0..20000 {
            let resid = &gram(&v) - a;
            // ∇_V ‖VV† - A‖² = 4 (VV† - A) V
            let grad: Vec<Vec<C64>> = v
                .iter()
                .map(|col| (0..d).map(|i| (0..d).map(|k| resid.get(i, k) * col[k]).sum::<C64>() * 4.0).collect())
                .collect();
            let gnorm2: f64 = grad.iter().flatten().map(|z| z.norm_sqr()).sum();
            if gnorm2 < 1e-26 {
                break;
            }
            step *= 2.0;
            loop {
                let trial: Vec<Vec<C64>> = v
                    .iter()
                    .zip(&grad)
                    .map(|(c, g)| c.iter().zip(g).map(|(x, y)| x - y * step).collect())
                    .collect();
                let ft = gram(&trial).distance(a).powi(2);
                if ft <= f - 0.5 * step * gnorm2 || step < 1e-18 {
                    v = trial;
                    f = ft;
                    break;
                }
                step *= 0.5;
            }
        }
        if f.sqrt() < best.0 {
            best = (f.sqrt(), gram(&v));
        }
    }
    best
}

#[test]
fn psd_projection_matches_factored_descent_over_all_ranks() {
    let mut rng = RngStream::new(202);
    for trial in 0..12 {
        let d = 2 + trial % 3;
        let a = random_hermitian(d, &mut rng);
        let (_, oracle) = (0..=d)
            .map(|r| factored_projection(&a, r, &mut rng))
            .min_by(|x, y| x.0.total_cmp(&y.0))
            .unwrap();
        let p = psd_project(&a).unwrap();
        assert!(p.distance(&oracle) < 1e-6, "d={d}: distance {}", p.distance(&oracle));
    }
}

#[test]
fn signature_counts_match_polynomial_roots() {
    let mut rng = RngStream::new(303);
    for _ in 0..20 {
        let a = random_hermitian(5, &mut rng);
        let roots = polynomial_roots(&characteristic_polynomial(&a));
        let pos = roots.iter().filter(|z| z.re > 1e-6).count();
        let neg = roots.iter().filter(|z| z.re < -1e-6).count();
        assert_eq!(signature(&a, None).unwrap(), (pos, neg));
    }
}

#[test]
fn kronecker_product_follows_index_formula() {
    let mut rng = RngStream::new(404);
    let a = random_hermitian(2, &mut rng);
    let b = ComplexMatrix::from_fn(3, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let k = a.kron(&b);
    assert_eq!(k.dim(), 6);
    for i in 0..2 {
        for j in 0..2 {
            for p in 0..3 {
                for q in 0..3 {
                    let want = a.get(i, j) * b.get(p, q);
                    assert!((k.get(3 * i + p, 3 * j + q) - want).norm() < 1e-15);
                }
            }
        }
    }
}
