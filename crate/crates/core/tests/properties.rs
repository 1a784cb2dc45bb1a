use proptest::prelude::*;
use strictqst::estimators::{estimate_max_likelihood, EstimatorSpec};
use strictqst::linalg::{eigh, psd_project, ComplexMatrix};
use strictqst::measurement::{kernel_analysis, sample_record, BasisSet, MeasurementRecord, PovmMap};
use strictqst::quantum::{random_full_rank_state, random_pure_state, random_rank_r_state, QuantumState};
use strictqst::{Execution, RngStream};

fn hermitian(d: usize, seed: u64, scale: f64) -> ComplexMatrix {
    let mut rng = RngStream::new(seed);
    let g = ComplexMatrix::from_fn(d, |_, _| strictqst::quantum::complex_gaussian(&mut rng) * scale);
    g.hermitian_part()
}

fn min_eigenvalue(a: &ComplexMatrix) -> f64 {
    eigh(a).unwrap().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn eigh_reconstructs_with_unitary_eigenvectors(d in 2usize..=16, seed in any::<u64>(), scale in 1e-3f64..1e3) {
        let a = hermitian(d, seed, scale);
        let eig = eigh(&a).unwrap();
        prop_assert!(eig.reconstruct().distance(&a) <= 1e-10 * a.frobenius_norm().max(1.0));
        prop_assert!(eig.eigenvectors.is_unitary(1e-10));
        prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn psd_projection_is_idempotent_contractive_and_psd(d in 2usize..=12, s1 in any::<u64>(), s2 in any::<u64>()) {
        let a = hermitian(d, s1, 1.0);
        let b = hermitian(d, s2, 1.0);
        let pa = psd_project(&a).unwrap();
        let pb = psd_project(&b).unwrap();
        prop_assert!(min_eigenvalue(&pa) >= -1e-12);
        prop_assert!(psd_project(&pa).unwrap().distance(&pa) <= 1e-12 * pa.frobenius_norm().max(1.0));
        prop_assert!(pa.distance(&pb) <= a.distance(&b) + 1e-12);
        // The residual A − P(A) is negative semidefinite and orthogonal to P(A).
        let resid = &a - &pa;
        prop_assert!(resid.inner_re(&pa).abs() <= 1e-10);
        prop_assert!(min_eigenvalue(&resid.scale(-1.0)) >= -1e-12);
    }

    #[test]
    fn measurement_map_is_linear_trace_preserving_and_adjoint_consistent(
        d in 2usize..=8, k in 1usize..=6, seed in any::<u64>(), alpha in -3.0f64..3.0, beta in -3.0f64..3.0,
    ) {
        let mut rng = RngStream::new(seed);
        let povm = PovmMap::from_bases(&BasisSet::global_random(d, k, &mut rng));
        let x = hermitian(d, seed ^ 1, 1.0);
        let y = hermitian(d, seed ^ 2, 1.0);
        let combo = x.scale(alpha).add_scaled(beta, &y);
        let (mx, my, mc) = (povm.apply_map(&x).unwrap(), povm.apply_map(&y).unwrap(), povm.apply_map(&combo).unwrap());
        for ((a, b), c) in mx.iter().zip(&my).zip(&mc) {
            prop_assert!((alpha * a + beta * b - c).abs() <= 1e-12);
        }
        prop_assert!((mx.iter().sum::<f64>() - x.trace().re).abs() <= 1e-12);
        for block in povm.basis_probabilities(&x).chunks(d) {
            prop_assert!((block.iter().sum::<f64>() - x.trace().re).abs() <= 1e-12);
        }
        let v: Vec<f64> = (0..povm.n_outcomes()).map(|i| ((i * 7 + 3) % 11) as f64 - 5.0).collect();
        let lhs: f64 = mx.iter().zip(&v).map(|(a, b)| a * b).sum();
        prop_assert!((lhs - x.inner_re(&povm.apply_adjoint(&v))).abs() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn likelihood_never_decreases_along_the_iteration(
        d in 2usize..=5, k in 1usize..=4, rank in 1usize..=3, shots in 20u64..2000, seed in any::<u64>(),
    ) {
        let mut rng = RngStream::new(seed);
        let povm = PovmMap::from_bases(&BasisSet::global_random(d, k, &mut rng));
        let sigma = random_rank_r_state(d, rank.min(d), &mut rng).unwrap();
        let record = sample_record(&povm, &sigma, shots, &mut rng).unwrap();
        let res = estimate_max_likelihood(&povm, &record, &EstimatorSpec::max_likelihood()).unwrap();
        for w in res.objective_trace.windows(2) {
            prop_assert!(w[1] >= w[0], "{} then {}", w[0], w[1]);
        }
        prop_assert!(min_eigenvalue(res.rho_hat.rho()) >= -1e-10);
    }

    #[test]
    fn kernel_elements_are_traceless_and_annihilated(d in 2usize..=6, k in 1usize..=4, seed in any::<u64>()) {
        let rng = RngStream::new(seed);
        let povm = PovmMap::from_bases(&BasisSet::global_random(d, k, &mut rng.split(0)));
        let report = kernel_analysis(&povm, 1, 4, &rng.split(1), Execution::Sequential);
        prop_assert_eq!(report.kernel_basis.len(), report.kernel_dimension);
        prop_assert_eq!(report.rank + report.kernel_dimension, d * d);
        for z in &report.kernel_basis {
            prop_assert!(z.trace().norm() <= 1e-8);
            prop_assert!(z.is_hermitian(1e-12));
            prop_assert!(povm.apply_map(z).unwrap().iter().all(|p| p.abs() <= 1e-10));
        }
    }

    #[test]
    fn sampled_states_are_valid_density_matrices(d in 2usize..=10, rank in 1usize..=10, seed in any::<u64>()) {
        let mut rng = RngStream::new(seed);
        let states: Vec<QuantumState> = vec![
            random_pure_state(d, &mut rng),
            random_rank_r_state(d, rank.min(d), &mut rng).unwrap(),
            random_full_rank_state(d, &mut rng),
        ];
        for s in &states {
            prop_assert!((s.rho().trace().re - 1.0).abs() <= 1e-12);
            prop_assert!(s.rho().is_hermitian(1e-12));
            prop_assert!(s.eigenvalues().iter().all(|&l| l >= -1e-12));
        }
        prop_assert_eq!(states[1].rank(), rank.min(d));
        let record = MeasurementRecord::noiseless(&PovmMap::from_bases(&BasisSet::computational(d)), &states[0]).unwrap();
        prop_assert!(record.values.iter().all(|&p| (-1e-12..=1.0 + 1e-12).contains(&p)));
    }
}
