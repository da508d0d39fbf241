use num_complex::Complex64;
use proptest::prelude::*;
use spinmzi::detection::{coeffs_di, coeffs_smi, matching_qcrb, sensitivity_oracle};
use spinmzi::qfi::{qfi_oracle, qfi_report_from_moments, qfim_from_moments, DEFAULT_STEP};
use spinmzi::{
    input_moments, propagate, sensitivity, su2_coherent, BeamSplitterF64, FockStateF64, Observable,
    Scenario, Scheme, Sensitivity, Su2CoherentParamsF64, TwoModeStateF64,
};

fn params() -> impl Strategy<Value = Su2CoherentParamsF64> {
    (1usize..=6, 0.0f64..3.0, 0.0f64..std::f64::consts::TAU).prop_map(|(two_j, mag, arg)| {
        Su2CoherentParamsF64::from_two_j(two_j, Complex64::from_polar(mag, arg)).unwrap()
    })
}

fn splitter() -> impl Strategy<Value = BeamSplitterF64> {
    (0.02f64..0.98).prop_map(|t| BeamSplitterF64::from_transmissivity(t).unwrap())
}

fn input(p: &Su2CoherentParamsF64) -> TwoModeStateF64 {
    TwoModeStateF64::tensor(&FockStateF64::vacuum(p.two_j()), &su2_coherent(p))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spin_coherent_state_is_normalized(p in params()) {
        let s = su2_coherent(&p);
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        let m = input_moments(&p);
        let n = 2.0 * p.j() * p.binomial_p();
        prop_assert!((m.mean_n - n).abs() < 1e-10 * (1.0 + n));
        prop_assert!((m.var_n - n * (1.0 - p.binomial_p())).abs() < 1e-10 * (1.0 + n));
    }

    #[test]
    fn qfi_matrix_structure(p in params(), bs1 in splitter()) {
        let m = input_moments(&p);
        let q = qfim_from_moments(&m, &bs1);
        let r = qfi_report_from_moments(&m, &bs1);
        prop_assert!(q.is_psd(1e-10));
        prop_assert!(r.f_a >= r.f_c - 1e-12);
        prop_assert!(r.f_b_exact >= r.f_c - 1e-12);
        if let Some(schur) = q.schur_difference() {
            prop_assert!((schur - r.f_c).abs() < 1e-10 * (1.0 + r.f_c));
        }
        prop_assert!((q.single_arm() - r.f_a).abs() < 1e-10 * (1.0 + r.f_a));
    }

    #[test]
    fn qfi_closed_forms_match_oracle(p in params(), bs1 in splitter(), phi in 0.0f64..6.0) {
        let m = input_moments(&p);
        let r = qfi_report_from_moments(&m, &bs1);
        let psi = input(&p);
        for (scenario, closed) in [
            (Scenario::SingleArm, r.f_a),
            (Scenario::Symmetric, r.f_b_exact),
            (Scenario::TwoParam, r.f_c),
        ] {
            let oracle = qfi_oracle(&psi, &bs1, scenario, phi, DEFAULT_STEP).unwrap();
            prop_assert!((closed - oracle).abs() <= 1e-6 * closed.abs().max(1e-3), "{:?}: {} vs {}", scenario, closed, oracle);
        }
    }

    #[test]
    fn intensity_coefficient_identities(bs1 in splitter(), bs2 in splitter(), phi in -10.0f64..10.0) {
        let s = coeffs_smi(&bs1, &bs2, phi);
        prop_assert!((s.a0 + s.a1 - 1.0).abs() < 1e-12);
        prop_assert!((s.a01.norm_sqr() - s.a0 * s.a1).abs() < 1e-12);
        let d = coeffs_di(&bs1, &bs2, phi);
        prop_assert!((d.ad * d.ad + d.cd.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn photon_number_conserved_through_interferometer(
        p in params(), bs1 in splitter(), bs2 in splitter(), phi in 0.0f64..6.3,
    ) {
        let psi = input(&p);
        let out = propagate(&psi, &bs1, &Scenario::Symmetric.config(phi), Some(&bs2)).unwrap();
        let before = psi.expect_number(0).unwrap() + psi.expect_number(1).unwrap();
        let after = out.expect_number(0).unwrap() + out.expect_number(1).unwrap();
        prop_assert!((before - after).abs() < 1e-12 * (1.0 + before));
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cramer_rao_bound_never_violated(
        p in params(), bs1 in splitter(), bs2 in splitter(), phi in 0.0f64..6.3, phi_l in 0.0f64..6.3,
    ) {
        let m = input_moments(&p);
        let r = qfi_report_from_moments(&m, &bs1);
        for scheme in Scheme::ALL {
            for scenario in [Scenario::SingleArm, Scenario::Symmetric] {
                let s = sensitivity(scheme, scenario, &m, &bs1, &bs2, phi, Some(phi_l));
                let bound = match (scheme, scenario) {
                    // The covariance-complete symmetric QFI is the bound that must hold.
                    (Scheme::Bh, Scenario::Symmetric) => spinmzi::qfi::qcrb(r.f_b_exact),
                    _ => matching_qcrb(&r, scheme, scenario),
                };
                if let Sensitivity::Finite(v) = s {
                    prop_assert!(v >= bound - 1e-9, "{:?}/{:?}: {} < {}", scheme, scenario, v, bound);
                }
            }
        }
    }

    #[test]
    fn sensitivity_closed_forms_match_oracle(
        p in params(), bs1 in splitter(), bs2 in splitter(), phi in 0.1f64..3.0, phi_l in 0.0f64..6.3,
    ) {
        let m = input_moments(&p);
        let psi = input(&p);
        for scheme in Scheme::ALL {
            for scenario in [Scenario::SingleArm, Scenario::Symmetric] {
                let closed = sensitivity(scheme, scenario, &m, &bs1, &bs2, phi, Some(phi_l));
                let oracle = sensitivity_oracle(
                    &psi, &bs1, &bs2, scenario, Observable::for_scheme(scheme, phi_l), phi, DEFAULT_STEP,
                ).unwrap();
                if let (Sensitivity::Finite(a), Sensitivity::Finite(b)) = (closed, oracle) {
                    // Near a pole both blow up; compare only well-conditioned points.
                    if a < 1e3 {
                        prop_assert!((a - b).abs() <= 1e-5 * b, "{:?}/{:?}: {} vs {}", scheme, scenario, a, b);
                    }
                }
            }
        }
    }

    #[test]
    fn difference_current_independent_of_placement(
        p in params(), bs1 in splitter(), bs2 in splitter(), phi in 0.0f64..6.3,
    ) {
        let m = input_moments(&p);
        let a = sensitivity(Scheme::Di, Scenario::SingleArm, &m, &bs1, &bs2, phi, None);
        let psi = input(&p);
        let b = sensitivity_oracle(&psi, &bs1, &bs2, Scenario::Symmetric, Observable::Nd, phi, DEFAULT_STEP).unwrap();
        if let (Sensitivity::Finite(x), Sensitivity::Finite(y)) = (a, b) {
            if x < 1e3 {
                prop_assert!((x - y).abs() <= 1e-5 * y);
            }
        }
    }

    #[test]
    fn single_precision_tracks_double(two_j in 1usize..=6, mag in 0.1f64..3.0, t in 0.05f64..0.95) {
        let p64 = Su2CoherentParamsF64::from_two_j(two_j, Complex64::new(mag, 0.0)).unwrap();
        let p32 = spinmzi::Su2CoherentParamsF32::from_two_j(two_j, num_complex::Complex32::new(mag as f32, 0.0)).unwrap();
        let r64 = spinmzi::qfi_report_su2(&p64, &BeamSplitterF64::from_transmissivity(t).unwrap());
        let r32 = spinmzi::qfi_report_su2(&p32, &spinmzi::BeamSplitterF32::from_transmissivity(t as f32).unwrap());
        prop_assert!(((r32.f_a as f64) - r64.f_a).abs() < 1e-4 * (1.0 + r64.f_a));
        prop_assert!(((r32.f_c as f64) - r64.f_c).abs() < 1e-4 * (1.0 + r64.f_c));
    }
}
