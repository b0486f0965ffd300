mod common;

use nalgebra::{DMatrix, DVector};
use opkernel::{
    assemble_gram, check_psd, evaluate_section, kernel_block, kolmogorov_factor, rkhs_norm_sq,
    BlockGram, CoefficientVector, Error, InputPoint, KernelConfig, SpaceDims, PSD_TOL,
};
use proptest::prelude::*;

use common::*;

fn point_set() -> impl Strategy<Value = (Vec<InputPoint>, Vec<usize>, f64)> {
    (1usize..8)
        .prop_flat_map(|n| {
            (
                prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), n),
                prop::collection::vec(1usize..=3, n),
                0.1f64..2.0,
            )
        })
        .prop_filter_map("distinct points", |(coords, d, sigma)| {
            let pts: Vec<InputPoint> = coords
                .iter()
                .map(|&(x, y)| InputPoint::new(vec![x, y]))
                .collect();
            let distinct =
                (0..pts.len()).all(|i| (i + 1..pts.len()).all(|j| pts[i].dist(&pts[j]) > 1e-3));
            distinct.then_some((pts, d, sigma))
        })
}

proptest! {
    #[test]
    fn gram_is_symmetric_psd_and_factorizes((pts, d, sigma) in point_set()) {
        let dims = SpaceDims::square(d).unwrap();
        let cfg = KernelConfig::scalar_gaussian(sigma);
        let g = assemble_gram(&pts, &dims, &cfg).unwrap();
        prop_assert_eq!(g.data(), &g.data().transpose());
        prop_assert_eq!(g.data(), &brute_scalar_gram(&pts, &dims, sigma));
        prop_assert!(check_psd(g.data(), PSD_TOL).unwrap().is_psd);
        let f = kolmogorov_factor(&g, 1e-14).unwrap();
        prop_assert!((f.reconstruct() - g.data()).amax() < 1e-10);
    }

    #[test]
    fn reproducing_identity_at_data_points((pts, d, sigma) in point_set(), seed in any::<u64>()) {
        let dims = SpaceDims::square(d).unwrap();
        let cfg = KernelConfig::scalar_gaussian(sigma);
        let g = assemble_gram(&pts, &dims, &cfg).unwrap();
        let mut r = rng(seed);
        let a = CoefficientVector::new(random_vector(&mut r, dims.total(), 1.0));
        let ka = g.data() * a.as_vector();
        for i in 0..pts.len() {
            let fx = evaluate_section(&a, &pts, &dims, &cfg, &pts[i], dims.d(i)).unwrap();
            prop_assert!((fx - ka.rows(dims.offset(i), dims.d(i))).amax() < 1e-12);
        }
    }
}

#[test]
fn feature_map_blocks_reproduce_kernel_blocks() {
    let pts = toy_points();
    let dims = toy_dims();
    let cfg = KernelConfig::toy(TOY_SIGMA, TOY_ALPHA);
    let g = assemble_gram(&pts, &dims, &cfg).unwrap();
    let f = kolmogorov_factor(&g, 1e-14).unwrap();
    for i in 0..6 {
        for j in 0..6 {
            let vij = f.feature_map(&dims, i).transpose() * f.feature_map(&dims, j);
            let kij = kernel_block(&cfg, &pts[i], dims.d(i), &pts[j], dims.d(j)).unwrap();
            assert!((vij - kij).amax() < 1e-10);
        }
    }
}

#[test]
fn evaluation_is_bounded_by_the_rkhs_norm() {
    // |uᵀ f(x)| ≤ ‖f‖ · sqrt(uᵀ K(x,x) u)
    let pts = toy_points();
    let dims = toy_dims();
    let cfg = KernelConfig::toy(TOY_SIGMA, TOY_ALPHA);
    let g = assemble_gram(&pts, &dims, &cfg).unwrap();
    let mut r = rng(11);
    let probes = [
        InputPoint::in_region(vec![0.5, 0.5], 1),
        InputPoint::in_region(vec![0.4, 0.41], 1),
        InputPoint::in_region(vec![0.7, -0.6], 2),
        InputPoint::in_region(vec![0.63, -0.46], 2),
    ];
    for _ in 0..100 {
        let a = CoefficientVector::new(random_vector(&mut r, dims.total(), 2.0));
        let norm = rkhs_norm_sq(&a, &g).unwrap().sqrt();
        for x in &probes {
            let dx = if x.region == Some(1) { 1 } else { 2 };
            let fx = evaluate_section(&a, &pts, &dims, &cfg, x, dx).unwrap();
            let u = random_vector(&mut r, dx, 1.0);
            let kxx = kernel_block(&cfg, x, dx, x, dx).unwrap();
            let bound = norm * u.dot(&(&kxx * &u)).sqrt();
            assert!(u.dot(&fx).abs() <= bound * (1.0 + 1e-12) + 1e-14);
        }
    }
}

#[test]
fn factor_of_a_low_rank_product() {
    let mut r = rng(12);
    for rank in 1..=4 {
        let a = DMatrix::from_fn(rank, 7, |_, _| rand::Rng::random_range(&mut r, -1.0..1.0));
        let m = a.transpose() * &a;
        let g = BlockGram::from_matrix(m.clone(), SpaceDims::square(vec![2, 1, 3, 1]).unwrap())
            .unwrap();
        let f = kolmogorov_factor(&g, 1e-10).unwrap();
        assert_eq!(f.rank(), rank);
        assert!((f.reconstruct() - m).amax() < 1e-10);
    }
}

#[test]
fn toy_gram_eigenvalues_agree_with_jacobi() {
    let g = assemble_gram(
        &toy_points(),
        &toy_dims(),
        &KernelConfig::toy(TOY_SIGMA, TOY_ALPHA),
    )
    .unwrap();
    let check = check_psd(g.data(), PSD_TOL).unwrap();
    let oracle = jacobi_eigenvalues(g.data());
    assert!((check.min_eig - oracle[0]).abs() < 1e-12);
    assert!((check.max_eig - oracle[8]).abs() < 1e-12);
    assert!(oracle[0] > 0.0);
}

#[test]
fn indefinite_matrix_fails_the_psd_check() {
    let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
    assert!(!check_psd(&m, PSD_TOL).unwrap().is_psd);
    let g = BlockGram::from_matrix(m, SpaceDims::square(vec![1, 1]).unwrap()).unwrap();
    assert!(matches!(
        kolmogorov_factor(&g, 1e-12),
        Err(Error::NotPsd { .. })
    ));
}

#[test]
fn duplicate_points_are_rejected() {
    let pts = vec![
        InputPoint::new(vec![0.1, 0.2]),
        InputPoint::new(vec![0.1, 0.2]),
    ];
    let err = assemble_gram(
        &pts,
        &SpaceDims::square(vec![1, 1]).unwrap(),
        &KernelConfig::scalar_gaussian(1.0),
    )
    .unwrap_err();
    assert!(matches!(err, Error::DuplicatePoints { .. }));
}

#[test]
fn section_of_single_kernel_column() {
    // f = K(·, x_0) v evaluated at x_1 is K(x_1, x_0) v
    let pts = vec![InputPoint::new(vec![0.0]), InputPoint::new(vec![0.3])];
    let dims = SpaceDims::square(vec![2, 1]).unwrap();
    let cfg = KernelConfig::scalar_gaussian(0.5);
    let a = CoefficientVector::from_slice(&[0.7, -1.1, 0.0]);
    let f = evaluate_section(&a, &pts, &dims, &cfg, &pts[1], 1).unwrap();
    let expected = (-0.09f64 / 0.25).exp() * 0.7;
    assert!((f - DVector::from_element(1, expected)).amax() < 1e-15);
}
