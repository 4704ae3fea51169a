use proptest::prelude::*;

use qrf_core::channel::{duality_residual, Channel};
use qrf_core::integrate::{integrate, random_function, sup_norm};
use qrf_core::linalg::{op_norm, pairing, partial_trace, trace_norm, ComplexMatrix, State, Subsystem};
use qrf_core::povm::noisy_basis_povm;
use qrf_core::random;
use qrf_core::relativize::{random_invariant, yen};
use qrf_core::scenario::{builtin, BUILTIN};

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 48,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn op_norm_is_submultiplicative(seed: u64, d in 1usize..7) {
        let mut rng = random::substream(seed, 1);
        let a = random::gaussian_matrix(&mut rng, d, d);
        let b = random::gaussian_matrix(&mut rng, d, d);
        let (na, nb) = (op_norm(&a).unwrap(), op_norm(&b).unwrap());
        prop_assert!(op_norm(&(&a * &b)).unwrap() <= na * nb * (1.0 + 1e-12));
        prop_assert!(op_norm(&(&a + &b)).unwrap() <= (na + nb) * (1.0 + 1e-12));
        prop_assert!((op_norm(&a.adjoint()).unwrap() - na).abs() <= 1e-12 * na.max(1.0));
    }

    #[test]
    fn trace_norm_bounds_the_pairing(seed: u64, d in 1usize..6) {
        let mut rng = random::substream(seed, 2);
        let t = random::gaussian_matrix(&mut rng, d, d);
        let a = random::gaussian_matrix(&mut rng, d, d);
        let bound = trace_norm(&t).unwrap() * op_norm(&a).unwrap();
        prop_assert!(pairing(&t, &a).unwrap().norm() <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn partial_trace_of_a_product(seed: u64, d1 in 1usize..4, d2 in 1usize..4) {
        let mut rng = random::substream(seed, 3);
        let a = random::gaussian_matrix(&mut rng, d1, d1);
        let b = random::gaussian_matrix(&mut rng, d2, d2);
        let ab = a.kron(&b);
        let left = partial_trace(&ab, d1, d2, Subsystem::Second).unwrap();
        let right = partial_trace(&ab, d1, d2, Subsystem::First).unwrap();
        prop_assert!(left.max_abs_diff(&a.scale(b.trace())) < 1e-12);
        prop_assert!(right.max_abs_diff(&b.scale(a.trace())) < 1e-12);
    }

    #[test]
    fn prob_measure_is_affine(seed: u64, t in 0.0f64..=1.0, eps in 0.0f64..=1.0) {
        let mut rng = random::substream(seed, 4);
        let e = noisy_basis_povm(3, eps).unwrap();
        let rho = random::state(&mut rng, 3);
        let sigma = random::state(&mut rng, 3);
        let mix = State::new(&rho.matrix().scale_real(t) + &sigma.matrix().scale_real(1.0 - t), 1e-9).unwrap();
        let (pr, ps, pm) = (
            e.prob_measure(&rho).unwrap(),
            e.prob_measure(&sigma).unwrap(),
            e.prob_measure(&mix).unwrap(),
        );
        for x in 0..3 {
            prop_assert!((pm.weights[x] - t * pr.weights[x] - (1.0 - t) * ps.weights[x]).abs() < 1e-12);
        }
        prop_assert!(pm.is_valid(1e-12, 1e-12));
    }

    #[test]
    fn pushforward_is_functorial(seed: u64, phi in prop::collection::vec(0usize..3, 4), psi in prop::collection::vec(0usize..2, 3)) {
        let mut rng = random::substream(seed, 5);
        let e = noisy_basis_povm(4, 0.3).unwrap();
        let composed: Vec<usize> = phi.iter().map(|&i| psi[i]).collect();
        let two_step = e.pushforward(&phi, 3).unwrap().pushforward(&psi, 2).unwrap();
        let one_step = e.pushforward(&composed, 2).unwrap();
        for y in 0..2 {
            prop_assert!(two_step.effect(y).max_abs_diff(one_step.effect(y)) < 1e-14);
        }
        let omega = random::state(&mut rng, 4);
        let p = e.prob_measure(&omega).unwrap();
        let q = one_step.prob_measure(&omega).unwrap();
        prop_assert!(p.pushforward(&composed, 2).max_abs_diff(&q) < 1e-12);
    }

    #[test]
    fn channel_composition_order(seed: u64, d1 in 1usize..4, d2 in 1usize..4, d3 in 1usize..4) {
        let mut rng = random::substream(seed, 6);
        // outer: B(C^d1) -> B(C^d2), inner: B(C^d2) -> B(C^d3)
        let outer = random::kraus_channel(&mut rng, d1, d2, d2.div_ceil(d1) + 1).unwrap();
        let inner = random::kraus_channel(&mut rng, d2, d3, d3.div_ceil(d2) + 1).unwrap();
        let both = Channel::compose(&outer, &inner).unwrap();
        let a = random::gaussian_matrix(&mut rng, d1, d1);
        let stepwise = inner.apply(&outer.apply(&a).unwrap()).unwrap();
        prop_assert!(both.apply(&a).unwrap().max_abs_diff(&stepwise) < 1e-12);
        prop_assert!(both.unitality_defect() < 1e-12);
        let rho = random::state(&mut rng, d3);
        prop_assert!(duality_residual(&both, &rho, &a).unwrap() < 1e-12);
    }

    #[test]
    fn integration_contracts(seed: u64, idx in 0usize..7, ds in 1usize..4) {
        let mut rng = random::substream(seed, 7);
        let s = builtin(BUILTIN[idx].0).unwrap();
        let e = s.frame.povm();
        let f = random_function(&mut rng, e.space_size(), ds);
        let m = integrate(&f, e).unwrap();
        prop_assert!(op_norm(&m).unwrap() <= sup_norm(&f) + 1e-9);
    }

    #[test]
    fn yen_is_linear_and_unital(seed: u64, idx in 0usize..7) {
        let mut rng = random::substream(seed, 8);
        let s = builtin(BUILTIN[idx].0).unwrap();
        let x = s.basepoint;
        let a = random_invariant(&mut rng, &s.frame, &s.rep_s, x).unwrap();
        let b = random_invariant(&mut rng, &s.frame, &s.rep_s, x).unwrap();
        let c = random::unit_disk_scalar(&mut rng);
        let lhs = yen(&s.frame, &s.rep_s, &(&a.scale(c) + &b), x).unwrap().matrix;
        let rhs = &yen(&s.frame, &s.rep_s, &a, x).unwrap().matrix.scale(c) + &yen(&s.frame, &s.rep_s, &b, x).unwrap().matrix;
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        let one = yen(&s.frame, &s.rep_s, &ComplexMatrix::identity(s.rep_s.dim()), x).unwrap().matrix;
        prop_assert!(one.max_abs_diff(&ComplexMatrix::identity(one.rows())) < 1e-12);
    }
}
