//! Cross-checks against dense linear algebra from nalgebra.

use ifp_core::solver::{fit_geometric_rate, fixed_point_iterate, reference_fixed_point};
use ifp_core::spectral::{
    default_epsilon, epsilon_power_method, krause_iteration, DEFAULT_P_SCHEDULE,
};
use ifp_core::{
    build_asymptotic, load, InterferenceMapping, Matrix, NormChoice, PositiveVector, StopRule,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn to_dmatrix(m: &Matrix) -> DMatrix<f64> {
    let n = m.dim();
    DMatrix::from_fn(n, n, |i, j| m.get(i, j))
}

fn eig_radius(m: &Matrix) -> f64 {
    to_dmatrix(m)
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Strictly positive random matrix rescaled to spectral radius `rho`.
fn random_matrix(rng: &mut ChaCha8Rng, n: usize, rho: f64) -> Matrix {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.gen_range(0.01..1.0)).collect())
        .collect();
    let m = Matrix::from_rows(&rows).unwrap();
    m.scaled(rho / eig_radius(&m))
}

#[test]
fn affine_fixed_point_matches_lu_solve() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let n = rng.gen_range(1..=8);
        let rho = rng.gen_range(0.05..0.9);
        let a = random_matrix(&mut rng, n, rho);
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..2.0)).collect();
        let t = InterferenceMapping::affine(a.clone(), PositiveVector::new(b.clone()).unwrap())
            .unwrap();

        let system = DMatrix::identity(n, n) - to_dmatrix(&a);
        let oracle = system.lu().solve(&DVector::from_vec(b)).unwrap();
        let x_ref = reference_fixed_point(&t).unwrap();
        let trace = fixed_point_iterate(
            &t,
            &vec![0.0; n],
            StopRule::new(1e-13, 100_000).unwrap(),
            &NormChoice::Sup,
            Some(&x_ref),
        )
        .unwrap();
        assert!(trace.converged());
        let scale = 1.0 + oracle.amax();
        for i in 0..n {
            assert!((x_ref[i] - oracle[i]).abs() < 1e-10 * scale);
            assert!((trace.last()[i] - oracle[i]).abs() < 1e-8 * scale);
        }
        if n > 1 {
            let fit = fit_geometric_rate(&trace).unwrap();
            assert!(
                (fit.rate - rho).abs() < 0.05 * rho,
                "rate {} vs {rho}",
                fit.rate
            );
        }
    }
}

#[test]
fn krause_matches_eigen_decomposition() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..40 {
        let n = rng.gen_range(2..=10);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(0.0..1.0)).collect())
            .collect();
        let m = Matrix::from_rows(&rows).unwrap();
        let am = build_asymptotic(
            &InterferenceMapping::affine(m.clone(), PositiveVector::ones(n).unwrap()).unwrap(),
        );
        let r = krause_iteration(&am, &vec![1.0; n], &NormChoice::Sup, 1e-13, 100_000).unwrap();
        let oracle = eig_radius(&m);
        assert!((r.rho - oracle).abs() < 1e-8 * (1.0 + oracle));
        assert!(r.residual < 1e-9);
    }
}

#[test]
fn epsilon_estimates_bracket_eigenvalue() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20 {
        let n = rng.gen_range(2..=6);
        let rho = rng.gen_range(0.2..1.5);
        let m = random_matrix(&mut rng, n, rho);
        let am = build_asymptotic(
            &InterferenceMapping::affine(m.clone(), PositiveVector::ones(n).unwrap()).unwrap(),
        );
        let eps = default_epsilon(&am).unwrap();
        let r = epsilon_power_method(
            &am,
            eps,
            &DEFAULT_P_SCHEDULE,
            &NormChoice::Sup,
            1e-13,
            1_000_000,
        )
        .unwrap();
        let oracle = eig_radius(&m);
        for w in r.estimates.windows(2) {
            assert!(w[1].1 <= w[0].1 + 1e-12);
        }
        assert!(r.estimates.iter().all(|&(_, e)| e >= oracle - 1e-10));
        assert!(r.rho - oracle < eps * (n as f64) / 1e5 + 1e-8);
    }
}

#[test]
fn load_radius_is_similarity_invariant() {
    let cfg = load::SnapshotConfig::default();
    let mut s = load::generate_snapshot(&cfg, 3).unwrap();
    let m = s.coupling_matrix();
    let oracle = eig_radius(&m);
    assert!((load::load_spectral_radius(&s).unwrap() - oracle).abs() < 1e-8);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..2 {
        s.stations
            .iter_mut()
            .for_each(|st| st.power_w = rng.gen_range(0.1..2.0));
        assert!((load::load_spectral_radius(&s).unwrap() - oracle).abs() < 1e-8);
    }
}
