use apm_core::frame::covariant_derivative;
use apm_core::sample::*;
use apm_core::Tensor;
use proptest::prelude::*;

fn dim_strategy() -> impl Strategy<Value = usize> {
    prop_oneof![Just(4usize), Just(6usize)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn contract_is_linear(seed in any::<u64>(), n in dim_strategy(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let mut rng = seeded(seed);
        let (g, _) = random_compatible_pair(n, &mut rng);
        let g_inv = g.try_inverse().unwrap();
        let t1 = random_tensor(3, n, &mut rng);
        let t2 = random_tensor(3, n, &mut rng);
        let lhs = t1.lincomb(a, &t2, b).unwrap().contract(&g_inv, 0, 2).unwrap();
        let rhs = t1.contract(&g_inv, 0, 2).unwrap()
            .lincomb(a, &t2.contract(&g_inv, 0, 2).unwrap(), b).unwrap();
        prop_assert!(lhs.distance(&rhs).unwrap() <= 1e-12);
    }

    #[test]
    fn antisymmetric_pair_contracts_to_zero(seed in any::<u64>(), n in dim_strategy()) {
        let mut rng = seeded(seed);
        let (g, _) = random_compatible_pair(n, &mut rng);
        let g_inv = g.try_inverse().unwrap();
        let g_inv = (&g_inv + g_inv.transpose()) * 0.5;
        let t = random_torsion_like(n, &mut rng);
        prop_assert!(t.contract(&g_inv, 0, 1).unwrap().max_abs() <= 1e-12);
    }

    #[test]
    fn compose_p_is_an_involution(seed in any::<u64>(), n in dim_strategy(), slot in 0usize..3) {
        let mut rng = seeded(seed);
        let (_, p) = random_compatible_pair(n, &mut rng);
        let t = random_tensor(3, n, &mut rng);
        let twice = t.compose_p(&p, slot).unwrap().compose_p(&p, slot).unwrap();
        prop_assert!(twice.distance(&t).unwrap() <= 1e-12);
    }

    #[test]
    fn cyclic_sum_is_idempotent_up_to_three(seed in any::<u64>(), n in dim_strategy()) {
        let mut rng = seeded(seed);
        let t = random_tensor(3, n, &mut rng);
        let c = t.cyclic_sum3().unwrap();
        prop_assert!(c.cyclic_sum3().unwrap().distance(&c.scale(3.0)).unwrap() <= 1e-12);
    }

    #[test]
    fn norm_sq_positive_for_nonzero(seed in any::<u64>(), n in dim_strategy(), idx in 0usize..64, v in 1e-6f64..10.0) {
        let mut rng = seeded(seed);
        let (g, _) = random_compatible_pair(n, &mut rng);
        let g_inv = g.try_inverse().unwrap();
        let mut data = vec![0.0; n * n * n];
        data[idx % (n * n * n)] = v;
        let t = Tensor::from_vec(3, n, data).unwrap();
        prop_assert!(t.norm_sq(&g_inv).unwrap() > 0.0);
        let r = random_tensor(3, n, &mut rng);
        prop_assert!(r.norm_sq(&g_inv).unwrap() > 0.0);
    }

    #[test]
    fn covariant_derivative_is_linear(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let mut rng = seeded(seed);
        let m = random_manifold(4, &mut rng);
        let lc = m.levi_civita();
        let t1 = random_tensor(2, 4, &mut rng);
        let t2 = random_tensor(2, 4, &mut rng);
        let lhs = covariant_derivative(&lc, &t1.lincomb(a, &t2, b).unwrap()).unwrap();
        let rhs = covariant_derivative(&lc, &t1).unwrap()
            .lincomb(a, &covariant_derivative(&lc, &t2).unwrap(), b).unwrap();
        prop_assert!(lhs.distance(&rhs).unwrap() <= 1e-12 * lhs.max_abs().max(1.0));
    }

    #[test]
    fn torsion_output_is_antisymmetric(seed in any::<u64>(), n in dim_strategy()) {
        let mut rng = seeded(seed);
        let (_, p) = random_compatible_pair(n, &mut rng);
        // Φ induced by a tensor with the symmetries of F
        let a = random_tensor(3, n, &mut rng);
        let s = &a + &a.permute(&[0, 2, 1]).unwrap();
        let f = (&s - &s.compose_p_slots(&p, &[1, 2]).unwrap()).scale(0.5);
        let phi = apm_core::natconn::phi_from_f(&f, &p);
        let t = apm_core::natconn::torsion_from_phi(&phi, &p);
        prop_assert!((&t + &t.permute(&[1, 0, 2]).unwrap()).max_abs() <= 1e-12);
        let q = apm_core::natconn::hayden_q_from_t(&random_torsion_like(n, &mut rng)).unwrap();
        prop_assert!((&q + &q.permute(&[0, 2, 1]).unwrap()).max_abs() <= 1e-12);
    }
}
