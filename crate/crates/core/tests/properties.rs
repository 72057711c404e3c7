//! Property tests for the closed-form identities and the form evaluators.

use abdirac_core::*;
use proptest::prelude::*;

fn subcritical_pairs() -> impl Strategy<Value = (f64, f64)> {
    (0.02f64..0.5, 0.0f64..1.0).prop_map(|(nu, frac)| {
        let ac = critical_field(nu).unwrap();
        (nu, ac * frac * 0.999)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn vieta_identities((nu, a) in subcritical_pairs()) {
        let params = CouplingParams::new(nu, a).unwrap();
        if let Ok((lo, hi)) = params.quadratic_roots_mu() {
            prop_assert!((lo * hi - 1.0).abs() < 1e-10);
            prop_assert!((lo + hi - (1.0 - 2.0 * a) / nu).abs() < 1e-9 * (1.0 / nu));
            prop_assert!(lo <= hi);
        }
    }

    #[test]
    fn lambda_mu_link((nu, a) in subcritical_pairs()) {
        let params = CouplingParams::new(nu, a).unwrap();
        let lambda = params.ground_state_energy().unwrap();
        let mu = params.lemma_square_mu().unwrap();
        prop_assert!((0.0..1.0).contains(&lambda));
        prop_assert!(((1.0 - lambda) / (1.0 + lambda) - mu * mu).abs() < 1e-12);
    }

    #[test]
    fn mode_energies_ordered((nu, a) in subcritical_pairs(), ell in 0i32..6) {
        let params = CouplingParams::new(nu, a).unwrap();
        let lo = params.mode_energy(ell).unwrap().lambda_ell;
        let hi = params.mode_energy(ell + 1).unwrap().lambda_ell;
        prop_assert!(lo <= hi + 1e-15);
    }

    #[test]
    fn regime_partition(nu in 0.01f64..0.5, a in 0.0f64..0.499) {
        let params = CouplingParams::new(nu, a).unwrap();
        let regime = params.regime();
        let ac = params.critical_field();
        match regime {
            Regime::Subcritical => prop_assert!(a < ac),
            Regime::Supercritical => prop_assert!(a > ac),
            Regime::Critical => prop_assert!((a - ac).abs() <= 1e-11 * ac.max(1.0)),
        }
        // energies exist precisely off the supercritical regime
        prop_assert_eq!(
            params.ground_state_energy().is_ok(),
            regime != Regime::Supercritical
        );
    }

    #[test]
    fn scaled_energy_consistency((nu, a) in subcritical_pairs(), c in 2.0f64..500.0) {
        let params = CouplingParams::new(nu, a).unwrap();
        if c > nu / params.half_gap_a() {
            let se = scaled_energy(&params, c).unwrap();
            let scaled = CouplingParams::new(nu / c, a).unwrap();
            let direct = scaled.ground_state_energy().unwrap();
            prop_assert!((se.lambda_c / (c * c) - direct).abs() < 1e-12);
            // the shifted energy approaches its limit from below
            prop_assert!(se.shifted < 0.0 && se.shifted <= se.limit);
        }
    }

    #[test]
    fn wirtinger_constant_bound(beta in -4.0f64..4.0) {
        let c = wirtinger_constant(beta, WirtingerVariant::Zbar);
        prop_assert!(c.value >= 0.0 && c.value <= 1.0 / 16.0 + 1e-15);
        let d = beta - c.attaining_mode as f64;
        prop_assert!((4.0 * c.value - d * d).abs() < 1e-14);
    }

    #[test]
    fn pauli_constant_symmetries(a in -3.0f64..3.0, zeta in -4.0f64..4.0) {
        let v = pauli_constant(a, zeta).value;
        prop_assert!((v - pauli_constant(a, -zeta).value).abs() < 1e-13);
        let via_wirtinger = (4.0 * wirtinger_constant(a - 0.5 * zeta, WirtingerVariant::Zbar).value)
            .min(4.0 * wirtinger_constant(a + 0.5 * zeta, WirtingerVariant::Z).value);
        prop_assert!((v - via_wirtinger).abs() < 1e-12);
    }
}

proptest! {
    // form evaluations are costly; keep the case count small
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn transform_identity_arbitrary_profiles(
        a_exp in 0.2f64..1.2,
        decay in 0.4f64..1.5,
        lambda in -0.9f64..0.9,
    ) {
        let params = CouplingParams::new(0.3, 0.1).unwrap();
        let grid = build_grid(GridSpec::default().with_n(600)).unwrap();
        let phi = RadialProfile::from_real_fn(&grid, |r| r.powf(a_exp) * (-decay * r).exp())
            .with_asymptotics(Some(a_exp), Some(decay))
            .unwrap();
        let eta = RadialProfile::from_real_fn(&grid, |r| {
            r.powf(a_exp + params.a()) * (-decay * r).exp()
        })
        .with_asymptotics(Some(a_exp + params.a()), Some(decay))
        .unwrap();
        let q = eval_q_mode(&phi, &params, lambda, 0).unwrap();
        let j = eval_j_mode(&eta, &params, lambda, 0).unwrap();
        prop_assert!((q.kinetic - j.kinetic).abs() <= 1e-9 * q.kinetic.abs().max(1.0));
        prop_assert!((q.total - j.total).abs() <= 1e-9 * q.total.abs().max(1.0));
    }

    #[test]
    fn lambda_star_bracket_is_sound(
        a_exp in -0.1f64..0.8,
        decay in 0.3f64..1.2,
    ) {
        let params = CouplingParams::new(0.3, 0.05).unwrap();
        let grid = build_grid(GridSpec::default().with_n(800)).unwrap();
        let p = RadialProfile::from_real_fn(&grid, |r| r.powf(a_exp) * (-decay * r).exp())
            .with_asymptotics(Some(a_exp), Some(decay))
            .unwrap();
        let res = lambda_star_default(&p, &params).unwrap();
        if let LambdaStarValue::Root(root) = res.value {
            // the root is an upper bound for the ground-state energy
            let lam = params.ground_state_energy().unwrap();
            prop_assert!(root >= lam - 1e-7, "root {root} below {lam}");
            prop_assert!(res.bracket.0 <= root && root <= res.bracket.1);
        }
    }
}
