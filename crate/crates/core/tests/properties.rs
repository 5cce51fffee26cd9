//! Property tests for the structural invariants.

use proptest::prelude::*;
use qkd_witness::channels::{apply_to_bob, depolarizing_channel, rotation_channel};
use qkd_witness::information::{conditional_mutual_information, separable_extension};
use qkd_witness::measurements::{joint_distribution, observed_pauli_table, qber, Basis, Protocol};
use qkd_witness::qlinalg::{hermitian_eig, partial_transpose, real_vec, Side};
use qkd_witness::sampling::{random_product_mixture, random_real_entangled, random_state, rng};
use qkd_witness::states::{is_ppt, product_mixture_state, PptVerdict};
use qkd_witness::witnesses::{
    detect_4state, evaluate_from_data, is_ew4, omega, omega_from_table, pseudo_mixture, witness_from_real_state,
};
use qkd_witness::VERDICT_TOL;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn distributions_are_normalized(seed in any::<u64>()) {
        let s = random_state(&mut rng(seed));
        for proto in [Protocol::four_state(), Protocol::six_state()] {
            let d = joint_distribution(&s, &proto);
            let total: f64 = d.entries().map(|e| e.4).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            let e = qber(&d).unwrap();
            prop_assert!((0.0..=1.0).contains(&e));
        }
    }

    #[test]
    fn omega_is_fixed_by_four_state_data(seed in any::<u64>()) {
        let s = random_state(&mut rng(seed));
        let d = joint_distribution(&s, &Protocol::four_state());
        let from_data = omega_from_table(&observed_pauli_table(&d)).unwrap();
        prop_assert!(from_data.max_abs_diff(&omega(&s)) < 1e-12);
        // Ω is invariant under every partial transposition.
        let om = omega(&s);
        prop_assert!(om.max_abs_diff(&partial_transpose(&om, Side::A)) < 1e-15);
        prop_assert!(om.max_abs_diff(&om.transpose()) < 1e-15);
    }

    #[test]
    fn detected_value_is_omega_minimum(seed in any::<u64>()) {
        let s = random_state(&mut rng(seed));
        let d = joint_distribution(&s, &Protocol::four_state());
        let r = detect_4state(&d, VERDICT_TOL).unwrap();
        let lambda = hermitian_eig(&omega(&s), 1e-12).unwrap().min_value();
        prop_assert!((r.value - lambda).abs() < 1e-10);
        if let Some(w) = r.witness {
            prop_assert!(is_ew4(&w, 1e-12));
            prop_assert!((w.expectation(&s) - r.value).abs() < 1e-10);
            // The 4-state verdict can only fire on entangled states.
            prop_assert_eq!(is_ppt(&s, VERDICT_TOL).verdict, PptVerdict::Npt);
        }
    }

    #[test]
    fn family_witnesses_evaluate_from_data(seed in any::<u64>()) {
        let mut r = rng(seed);
        let w = witness_from_real_state(&real_vec(random_real_entangled(&mut r, 1e-3)), 1e-9).unwrap();
        let s = random_state(&mut r);
        let d = joint_distribution(&s, &Protocol::four_state());
        prop_assert!((evaluate_from_data(&w, &d).unwrap() - w.expectation(&s)).abs() < 1e-12);
        let pm = pseudo_mixture(&w).unwrap();
        prop_assert!((pm.evaluate(&d).unwrap() - w.expectation(&s)).abs() < 1e-12);
    }

    #[test]
    fn separable_mixtures_stay_undetected(seed in any::<u64>(), k in 1usize..7) {
        let mut r = rng(seed);
        let mix = random_product_mixture(&mut r, k);
        let s = product_mixture_state(&mix, 1e-10).unwrap();
        prop_assert_eq!(is_ppt(&s, VERDICT_TOL).verdict, PptVerdict::Ppt);
        let d = joint_distribution(&s, &Protocol::four_state());
        prop_assert!(!detect_4state(&d, VERDICT_TOL).unwrap().verdict.is_detected());
        let ext = separable_extension(&mix, &Protocol::four_state()).unwrap();
        prop_assert!(conditional_mutual_information(&ext) < 1e-12);
        let zz = ext.sifted(Basis::Z).unwrap();
        prop_assert!(conditional_mutual_information(&zz) < 1e-12);
    }

    #[test]
    fn local_channels_preserve_alice(seed in any::<u64>(), theta in -7.0f64..7.0, p in 0.0f64..1.0) {
        let s = random_state(&mut rng(seed));
        for ch in [rotation_channel(theta), depolarizing_channel(p).unwrap()] {
            let out = apply_to_bob(&ch, &s).unwrap();
            prop_assert!(out.reduced_a().max_abs_diff(&s.reduced_a()) < 1e-12);
            prop_assert!((out.rho().trace().re - 1.0).abs() < 1e-12);
        }
    }
}
