mod common;

use approx::assert_abs_diff_eq;
use common::{jacobi_eigen, random_psd, random_symmetric};
use nalgebra::DMatrix;
use proptest::prelude::*;
use spca::linalg::{
    full_eigendecomposition, lanczos_top_eigpair, matrix_norm, matrix_sqrt, principal_submatrix,
    project_l1_ball, top_eigpair, NormKind, DEFAULT_EIG_TOL,
};
use spca::{Error, SymmetricMatrix};

/// Soft-threshold level found by bisection, independent of the sort-based
/// implementation.
fn l1_projection_oracle(x: &[f64], r: f64) -> Vec<f64> {
    if x.iter().map(|v| v.abs()).sum::<f64>() <= r {
        return x.to_vec();
    }
    let mass = |t: f64| x.iter().map(|v| (v.abs() - t).max(0.0)).sum::<f64>();
    let (mut lo, mut hi) = (0.0, x.iter().fold(0.0_f64, |m, v| m.max(v.abs())));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mass(mid) > r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    x.iter()
        .map(|v| v.signum() * (v.abs() - t).max(0.0))
        .collect()
}

#[test]
fn top_eigpair_matches_jacobi_on_random_symmetric() {
    for seed in 0..20 {
        let m = random_symmetric(8, seed);
        let (vals, vecs) = jacobi_eigen(&m);
        let p = top_eigpair(&m, DEFAULT_EIG_TOL, seed).unwrap();
        assert_abs_diff_eq!(p.value, vals[0], epsilon = 1e-8);
        let overlap: f64 = p.vector.iter().zip(&vecs[0]).map(|(a, b)| a * b).sum();
        assert_abs_diff_eq!(overlap.abs(), 1.0, epsilon = 1e-8);
    }
}

#[test]
fn lanczos_matches_jacobi() {
    for seed in 0..5 {
        let m = random_psd(40, 60, seed);
        let p = lanczos_top_eigpair(&m, 1e-10, seed).unwrap();
        let top = jacobi_eigen(&m).0[0];
        assert!((p.value - top).abs() <= 1e-8 * top);
    }
}

#[test]
fn full_decomposition_reconstructs_random_psd() {
    for seed in 0..20 {
        let m = random_psd(6, 9, seed);
        let pairs = full_eigendecomposition(&m).unwrap();
        let mut rec = DMatrix::zeros(6, 6);
        for p in &pairs {
            rec += p.value * &p.vector * p.vector.transpose();
        }
        assert!((rec - m.as_matrix()).norm() <= 1e-8 * m.as_matrix().norm().max(1.0));
        assert!(pairs.windows(2).all(|w| w[0].value >= w[1].value));
        let (oracle, _) = jacobi_eigen(&m);
        for (p, o) in pairs.iter().zip(oracle) {
            assert_abs_diff_eq!(p.value, o, epsilon = 1e-9 * m.as_matrix().norm());
        }
    }
}

#[test]
fn swap_and_diagonal_spectra() {
    let swap = SymmetricMatrix::from_row_slice(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
    let vals: Vec<f64> = full_eigendecomposition(&swap)
        .unwrap()
        .iter()
        .map(|p| p.value)
        .collect();
    assert_abs_diff_eq!(vals[0], 1.0, epsilon = 1e-14);
    assert_abs_diff_eq!(vals[1], -1.0, epsilon = 1e-14);

    let two = SymmetricMatrix::from_row_slice(2, &[2.0, 1.0, 1.0, 2.0]).unwrap();
    let p = top_eigpair(&two, DEFAULT_EIG_TOL, 0).unwrap();
    assert_abs_diff_eq!(p.value, 3.0, epsilon = 1e-12);
    assert_abs_diff_eq!(p.vector[0], 0.5f64.sqrt(), epsilon = 1e-12);
    assert_abs_diff_eq!(p.vector[1], 0.5f64.sqrt(), epsilon = 1e-12);
}

#[test]
fn sqrt_examples() {
    let d = SymmetricMatrix::from_diagonal(&[4.0, 9.0]).unwrap();
    assert_eq!(
        matrix_sqrt(&d).unwrap(),
        SymmetricMatrix::from_diagonal(&[2.0, 3.0]).unwrap()
    );
    let id = SymmetricMatrix::identity(4);
    assert!((matrix_sqrt(&id).unwrap().as_matrix() - id.as_matrix()).norm() < 1e-14);
    let mut rng = common::rng(3);
    let v = common::unit_vector(7, &mut rng);
    let p = SymmetricMatrix::outer(&v).unwrap();
    assert!((matrix_sqrt(&p).unwrap().as_matrix() - p.as_matrix()).norm() < 1e-12);
    let indefinite = SymmetricMatrix::from_diagonal(&[1.0, -1.0]).unwrap();
    assert!(matches!(
        matrix_sqrt(&indefinite),
        Err(Error::NotPsd { .. })
    ));
}

#[test]
fn norm_examples() {
    let m = SymmetricMatrix::from_row_slice(2, &[1.0, -2.0, -2.0, 1.0]).unwrap();
    assert_eq!(matrix_norm(&m, NormKind::EntryL1), 6.0);
    assert_eq!(matrix_norm(&m, NormKind::EntryInf), 2.0);
    assert_abs_diff_eq!(matrix_norm(&m, NormKind::Spectral), 3.0, epsilon = 1e-12);
    assert_abs_diff_eq!(
        matrix_norm(&SymmetricMatrix::identity(3), NormKind::Frobenius),
        3f64.sqrt(),
        epsilon = 1e-15
    );
}

#[test]
fn submatrix_examples() {
    let d = SymmetricMatrix::from_diagonal(&[1.0, 2.0, 3.0]).unwrap();
    assert_eq!(
        principal_submatrix(&d, &[0, 2]).unwrap(),
        SymmetricMatrix::from_diagonal(&[1.0, 3.0]).unwrap()
    );
    let m = random_symmetric(4, 9);
    assert_eq!(principal_submatrix(&m, &[0, 1, 2, 3]).unwrap(), m);
    let s = principal_submatrix(&m, &[1, 3]).unwrap();
    assert_eq!(s.get(0, 0), m.get(1, 1));
    assert_eq!(s.get(0, 1), m.get(1, 3));
    assert_eq!(s.get(1, 1), m.get(3, 3));
    assert!(matches!(
        principal_submatrix(&m, &[2, 1]),
        Err(Error::UnsortedOrDuplicateIndex { .. })
    ));
    assert!(principal_submatrix(&m, &[4]).is_err());
    assert!(principal_submatrix(&m, &[]).is_err());
}

#[test]
fn asymmetry_handling() {
    let near = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5 + 1e-14, 1.0]);
    let m = SymmetricMatrix::new(near).unwrap();
    assert_eq!(m.get(0, 1), m.get(1, 0));
    let far = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.6, 1.0]);
    assert!(matches!(
        SymmetricMatrix::new(far),
        Err(Error::Asymmetric { .. })
    ));
    let nan = DMatrix::from_row_slice(1, 1, &[f64::NAN]);
    assert!(SymmetricMatrix::new(nan).is_err());
}

#[test]
fn projection_examples() {
    assert_eq!(project_l1_ball(&[0.5, 0.3], 2.0), vec![0.5, 0.3]);
    assert_eq!(project_l1_ball(&[3.0, 1.0], 2.0), vec![2.0, 0.0]);
    assert_eq!(project_l1_ball(&[1.0, 1.0], 1.0), vec![0.5, 0.5]);
}

proptest! {
    #[test]
    fn projection_matches_bisection_oracle(
        x in prop::collection::vec(-5.0f64..5.0, 1..40),
        r in 0.01f64..10.0,
    ) {
        let p = project_l1_ball(&x, r);
        let o = l1_projection_oracle(&x, r);
        for (a, b) in p.iter().zip(&o) {
            prop_assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
        }
        prop_assert!(p.iter().map(|v| v.abs()).sum::<f64>() <= r * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn sqrt_squares_back(seed in 0u64..1000, d in 1usize..8, n in 1usize..10) {
        let w = random_psd(d, n, seed);
        let root = matrix_sqrt(&w).unwrap();
        let back = root.as_matrix() * root.as_matrix();
        let scale = w.as_matrix().norm().max(1.0);
        prop_assert!((back - w.as_matrix()).norm() <= 1e-8 * scale);
    }

    #[test]
    fn spectral_norm_bounds(seed in 0u64..1000, d in 1usize..10) {
        let m = random_symmetric(d, seed);
        let s = matrix_norm(&m, NormKind::Spectral);
        let f = matrix_norm(&m, NormKind::Frobenius);
        let inf = matrix_norm(&m, NormKind::EntryInf);
        prop_assert!(inf <= s + 1e-12 && s <= f + 1e-12);
    }
}
