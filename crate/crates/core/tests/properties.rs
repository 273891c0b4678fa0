//! Property tests for the operator family, derivative forms, and the cone
//! sampler.

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nnlr_core::objectives::{
    eval_stacked, fd_gradient_check, grad_stacked, hess_cross_g, hess_quad_g, Instance,
    FD_GRAD_STEP,
};
use nnlr_core::operators::{KernelOperator, MeasurementMap, Operator};
use nnlr_core::optimality::{critical_cone, sample_cone_direction};

/// Kernel parameters with valid shape and `delta < 1`.
fn kernel_strategy() -> impl Strategy<Value = KernelOperator> {
    (
        1usize..=2,
        0usize..=2,
        2usize..=8,
        0.05f64..0.9,
        0.05f64..0.95,
    )
        .prop_filter_map("shape fits", |(r_star, extra, n, eps, frac)| {
            let r = r_star + extra;
            if r + r_star > n {
                return None;
            }
            let alpha = frac * KernelOperator::alpha_upper_bound(r, r_star, eps);
            KernelOperator::new(n, r, r_star, eps, alpha).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kernel_application_is_linear_and_symmetry_preserving(
        kernel in kernel_strategy(),
        seed in 0u64..1000,
    ) {
        let n = kernel.n();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = DMatrix::from_fn(n, n, |_, _| rand::Rng::gen_range(&mut rng, -1.0..1.0));
        let y = DMatrix::from_fn(n, n, |_, _| rand::Rng::gen_range(&mut rng, -1.0..1.0));
        let (a, b) = (0.7, -1.3);
        let lhs = kernel.apply(&(&x * a + &y * b)).unwrap();
        let rhs = kernel.apply(&x).unwrap() * a + kernel.apply(&y).unwrap() * b;
        prop_assert!((lhs - rhs).norm() <= 1e-12);

        let sym = (&x + x.transpose()) * 0.5;
        let hs = kernel.apply(&sym).unwrap();
        prop_assert!((&hs - hs.transpose()).norm() <= 1e-12);
    }

    #[test]
    fn realization_composition_and_adjoint(kernel in kernel_strategy(), seed in 0u64..1000) {
        let n = kernel.n();
        let map = MeasurementMap::new(kernel.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = DMatrix::from_fn(n, n, |_, _| rand::Rng::gen_range(&mut rng, -1.0..1.0));
        let y = DMatrix::from_fn(n, n, |_, _| rand::Rng::gen_range(&mut rng, -1.0..1.0));
        let composed = map.apply_adjoint(&map.apply(&x).unwrap()).unwrap();
        prop_assert!((composed - kernel.apply(&x).unwrap()).norm() <= 1e-10);
        let lhs = map.apply(&x).unwrap().dot(&y);
        let rhs = x.dot(&map.apply_adjoint(&y).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-12);
    }

    #[test]
    fn rip_constant_matches_dense_vector_norms(kernel in kernel_strategy()) {
        let b = kernel.b_vec();
        let c = kernel.c_vec();
        prop_assert!((kernel.rip_constant() - b.norm() * c.norm()).abs() <= 1e-12);
        prop_assert_eq!(b.dot(&c), 0.0);
    }

    #[test]
    fn sampled_cone_directions_are_members(
        entries in proptest::collection::vec(0.0f64..2.0, 12),
        grads in proptest::collection::vec(-1.0f64..1.0, 12),
        seed in 0u64..1000,
    ) {
        let u = DMatrix::from_column_slice(4, 3, &entries);
        let g = DMatrix::from_column_slice(4, 3, &grads);
        let mask = critical_cone(&u, &g, 1e-9).unwrap();
        prop_assume!(mask.support_len() > 0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..16 {
            let dir = sample_cone_direction(&mask, &mut rng).unwrap();
            prop_assert!(mask.contains(&dir));
            prop_assert!((dir.norm() - 1.0).abs() <= 1e-12);
        }
    }
}

fn random_asym_instance(kernel: &KernelOperator, lambda: f64) -> Instance {
    let n = kernel.n();
    let r_star = kernel.r_star();
    let q1 = DMatrix::from_fn(n, r_star, |i, j| if i == j { 1.0 } else { 0.0 });
    Instance::asymmetric(
        Operator::structured(kernel.clone()).unwrap(),
        q1.clone(),
        q1,
        kernel.r(),
        lambda,
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn polarization_identity_on_random_instances(
        kernel in kernel_strategy(),
        lambda in 0.0f64..1.0,
        seed in 0u64..1000,
    ) {
        let inst = random_asym_instance(&kernel, lambda);
        let (n, r) = (kernel.n(), kernel.r());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut mat = |rows: usize| {
            DMatrix::from_fn(rows, r, |_, _| rand::Rng::gen_range(&mut rng, -1.0..1.0))
        };
        let (l, rm) = (mat(n), mat(n));
        let (l1, r1, l2, r2) = (mat(n), mat(n), mat(n), mat(n));
        let cross = hess_cross_g(&inst, &l, &rm, &l1, &r1, &l2, &r2).unwrap();
        let qp = hess_quad_g(&inst, &l, &rm, &(&l1 + &l2), &(&r1 + &r2)).unwrap();
        let qm = hess_quad_g(&inst, &l, &rm, &(&l1 - &l2), &(&r1 - &r2)).unwrap();
        prop_assert!((cross - 0.25 * (qp - qm)).abs() <= 1e-10);
    }

    #[test]
    fn full_objective_gradient_is_consistent(
        kernel in kernel_strategy(),
        lambda in 0.0f64..1.0,
        seed in 0u64..1000,
    ) {
        let inst = random_asym_instance(&kernel, lambda);
        let (n, r) = (kernel.n(), kernel.r());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let point = DMatrix::from_fn(2 * n, r, |_, _| rand::Rng::gen_range(&mut rng, -1.0..1.0));
        let grad = grad_stacked(&inst, &point).unwrap();
        let err = fd_gradient_check(
            |p| eval_stacked(&inst, p).unwrap(),
            &grad,
            &point,
            FD_GRAD_STEP,
        );
        prop_assert!(err <= 1e-6, "relative error {err}");
    }
}
