mod common;

use nalgebra::DVector;
use opkernel::{
    gradient_i, hessian_i, jacobian_h, learning_functional, project_onto_span, residual_h,
    CoefficientVector, InputPoint, LossKind, ResidualVariant,
};
use proptest::prelude::*;
use rand::Rng;

use common::*;

const SMOOTH: [LossKind; 3] = [
    LossKind::LeastSquares,
    LossKind::ExponentialLeastSquares,
    LossKind::Sigmoid,
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gradient_and_hessian_match_finite_differences(seed in any::<u64>(), which in 0usize..3) {
        let mut r = rng(seed);
        let spec = random_spec(&mut r, SMOOTH[which]);
        let a = random_vector(&mut r, spec.n(), 1.0);
        let c = CoefficientVector::new(a.clone());
        let g = gradient_i(&spec, &c).unwrap();
        let fd = central_gradient(functional_of(&spec), &a, 1e-5);
        prop_assert!(rel_err(g.as_slice(), fd.as_slice()) <= 1e-5);
        let h = hessian_i(&spec, &c).unwrap();
        let fd_h = central_jacobian(|x| gradient_i(&spec, &CoefficientVector::new(x.clone())).unwrap(), &a, 1e-5);
        prop_assert!(rel_err(h.as_slice(), fd_h.as_slice()) <= 1e-5);
        prop_assert_eq!(&h, &h.transpose());
    }

    #[test]
    fn residual_jacobians_match_finite_differences(seed in any::<u64>(), which in 0usize..2) {
        let mut r = rng(seed);
        let spec = random_spec(&mut r, SMOOTH[which]);
        let a = random_vector(&mut r, spec.n(), 1.0);
        for variant in [ResidualVariant::PaperFaithful, ResidualVariant::GradientConsistent] {
            let j = jacobian_h(&spec, &CoefficientVector::new(a.clone()), variant).unwrap();
            let fd = central_jacobian(
                |x| residual_h(&spec, &CoefficientVector::new(x.clone()), variant).unwrap(),
                &a,
                1e-5,
            );
            prop_assert!(rel_err(j.as_slice(), fd.as_slice()) <= 1e-5, "{:?}", variant);
        }
    }

    #[test]
    fn gradient_consistent_residual_is_the_scaled_gradient(seed in any::<u64>(), which in 0usize..2) {
        // ∇I = 2γ_A K B(a)
        let mut r = rng(seed);
        let spec = random_spec(&mut r, SMOOTH[which]);
        let a = CoefficientVector::new(random_vector(&mut r, spec.n(), 1.0));
        let b = residual_h(&spec, &a, ResidualVariant::GradientConsistent).unwrap();
        let g = gradient_i(&spec, &a).unwrap();
        let rebuilt = spec.gram().data() * b * (2.0 * spec.gamma_a());
        prop_assert!(rel_err(rebuilt.as_slice(), g.as_slice()) <= 1e-12);
    }

    #[test]
    fn least_squares_variants_coincide(seed in any::<u64>()) {
        let mut r = rng(seed);
        let spec = random_spec(&mut r, LossKind::LeastSquares);
        let a = CoefficientVector::new(random_vector(&mut r, spec.n(), 1.0));
        let p = residual_h(&spec, &a, ResidualVariant::PaperFaithful).unwrap();
        let g = residual_h(&spec, &a, ResidualVariant::GradientConsistent).unwrap();
        prop_assert!((p - g).amax() < 1e-12);
    }

    #[test]
    fn exponential_least_squares_is_sandwiched(seed in any::<u64>()) {
        // γ_A aᵀKa + γ_I fᵀMf ≤ I(a) ≤ that + 1
        let mut r = rng(seed);
        let spec = random_spec(&mut r, LossKind::ExponentialLeastSquares);
        let a = CoefficientVector::new(random_vector(&mut r, spec.n(), 3.0));
        let f = spec.sample(&a);
        let reg = spec.gamma_a() * a.as_vector().dot(&f)
            + spec.gamma_i() * f.dot(&(spec.regularizer().matrix() * &f));
        let v = learning_functional(&spec, &a).unwrap();
        prop_assert!(reg - 1e-12 <= v && v <= reg + 1.0 + 1e-12);
    }

    #[test]
    fn projection_solves_the_normal_equations(seed in any::<u64>()) {
        let mut r = rng(seed);
        let spec = random_spec(&mut r, LossKind::LeastSquares);
        let mut extra = Vec::new();
        while extra.len() < 2 {
            let p = InputPoint::new(vec![r.random_range(0.0..1.0), r.random_range(0.0..1.0)]);
            if spec.points().iter().chain(extra.iter().map(|(q, _)| q)).all(|q| q.dist(&p) > 0.2) {
                extra.push((p, r.random_range(1..=2usize)));
            }
        }
        let mut all_points = spec.points().to_vec();
        all_points.extend(extra.iter().map(|(p, _)| p.clone()));
        let layout = spec.dims().extended(&extra.iter().map(|&(_, d)| d).collect::<Vec<_>>()).unwrap();
        let k_ext = brute_scalar_gram(&all_points, &layout, 0.5);
        let b = random_vector(&mut r, layout.total(), 1.0);
        let n = spec.n();
        let k = k_ext.view((0, 0), (n, n)).into_owned();
        let rhs = k_ext.rows(0, n) * &b;
        let oracle = k.lu().solve(&rhs).unwrap();
        let c = project_onto_span(&spec, &extra, &b).unwrap();
        prop_assert!((c.as_vector() - oracle).amax() < 1e-8);
    }
}

#[test]
fn toy_functional_at_zero_has_closed_form() {
    let spec = toy_spec();
    let v = learning_functional(&spec, &CoefficientVector::zeros(9)).unwrap();
    let y2 = TOY_Y2[0] * TOY_Y2[0] + TOY_Y2[1] * TOY_Y2[1];
    let expected = (2.0 - (-TOY_Y1 * TOY_Y1).exp() - (-y2).exp()) / 2.0;
    assert!((v - expected).abs() < 1e-15);
}

#[test]
fn paper_residual_differs_from_the_gradient_for_els() {
    let spec = toy_spec();
    let a = CoefficientVector::from_slice(&A_PAPER);
    let p = residual_h(&spec, &a, ResidualVariant::PaperFaithful).unwrap();
    let g = residual_h(&spec, &a, ResidualVariant::GradientConsistent).unwrap();
    assert!((p - g).amax() > 1e-3);
}

#[test]
fn wrong_length_is_a_dimension_error() {
    let spec = toy_spec();
    let a = CoefficientVector::new(DVector::zeros(8));
    assert!(matches!(
        learning_functional(&spec, &a),
        Err(opkernel::Error::Dimension(_))
    ));
}
