use proptest::prelude::*;

use conespec::cone::{allowed_l_window, max_allowed_l, window_threshold};
use conespec::radial::{assemble, solve_radial_at};
use conespec::spectrum::{
    closed_form_anticone, real_order_root_exists, robin_constant, solve_cot_condition, solve_exact,
};
use conespec::{
    classify, full_spectrum, nu_squared, BoundaryCondition, Channel, ConeParams, Convention, Coupling, ExactOptions,
    ExpansionForm, GridSpec, Method, Regime, Spacing, SpectrumOptions, SpectrumReport,
};

fn fast() -> ExactOptions {
    ExactOptions {
        points_per_decade: 60,
        ..ExactOptions::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn regime_follows_sign_of_nu_squared(alpha in 0.05f64..6.0, l in -6i64..=6) {
        prop_assume!((alpha - 1.0).abs() > 1e-9);
        let nu2 = nu_squared(alpha, l);
        let r = classify(alpha, l).unwrap();
        match r {
            Regime::BoundTowerChannel => prop_assert!(nu2 < 0.0 && alpha < 1.0 && l == 0),
            Regime::Scattering => prop_assert!(alpha < 1.0 && l != 0 && nu2 > 1.0),
            Regime::BoundByDelta => prop_assert!(alpha > 1.0 && nu2 > 0.0 && nu2 < 1.0),
            Regime::EssentiallySelfAdjoint => prop_assert!(alpha > 1.0 && nu2 >= 1.0),
        }
    }

    #[test]
    fn window_matches_thresholds(alpha in 1.001f64..8.0) {
        let m = max_allowed_l(alpha).unwrap();
        prop_assert!(m >= 1);
        prop_assert!(alpha > window_threshold(m as u32));
        prop_assert!(alpha <= window_threshold(m as u32 + 1));
        prop_assert_eq!(allowed_l_window(alpha).unwrap().len() as i64, 2 * m + 1);
    }

    #[test]
    fn conventions_agree_off_the_tower(alpha in 1.01f64..5.0, lambda in 0.0f64..5.0) {
        let p = ConeParams::new(alpha, 1.0, Coupling::Finite(lambda)).unwrap();
        for l in allowed_l_window(alpha).unwrap() {
            let ch = p.channel(l).unwrap();
            prop_assert_eq!(
                robin_constant(&p, &ch, Convention::Integral).value,
                robin_constant(&p, &ch, Convention::Literal).value
            );
        }
    }

    #[test]
    fn cot_roots_satisfy_their_condition(alpha in 0.1f64..0.95, c in -20.0f64..20.0, n in 0u32..5) {
        let ch = Channel::new(alpha, 0).unwrap();
        for form in [ExpansionForm::Literal, ExpansionForm::Standard] {
            let s = solve_cot_condition(&ch, BoundaryCondition::Robin(c), n, form).unwrap();
            prop_assert!(s.residual < 1e-12);
            prop_assert!((s.epsilon - 0.25 * s.kappa * s.kappa).abs() <= 1e-15 * s.epsilon);
        }
    }

    #[test]
    fn pencil_is_symmetric(alpha in 0.2f64..4.0, c in -3.0f64..3.0, n in 100usize..600) {
        prop_assume!((alpha - 1.0).abs() > 1e-3);
        let ch = Channel::new(alpha, 0).unwrap();
        prop_assume!(ch.nu_squared.abs() > 1e-9);
        for spacing in [Spacing::LogSpaced, Spacing::Uniform] {
            let g = GridSpec::new(n, 300.0, spacing).unwrap();
            let p = assemble(&ch, BoundaryCondition::Robin(c), &g, 1.0).unwrap();
            prop_assert!(p.max_asymmetry() < 1e-14);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn real_order_has_at_most_one_root(nu in 0.05f64..0.95, c in -6.0f64..6.0) {
        prop_assume!((c + nu).abs() > 1e-2);
        let ch = Channel::from_nu_squared(0, nu * nu).unwrap();
        let bc = BoundaryCondition::Robin(c);
        let roots = solve_exact(&ch, bc, &fast()).unwrap();
        prop_assert!(roots.len() <= 1);
        // Roots pushed below the scan window are missed, so only the
        // clearly bound side is compared.
        if c < -nu - 0.2 {
            prop_assert_eq!(roots.len(), 1);
        }
        if roots.len() == 1 {
            prop_assert!(real_order_root_exists(nu, bc));
            prop_assert!(roots[0].residual < 1e-10);
        }
        if !real_order_root_exists(nu, bc) {
            prop_assert!(roots.is_empty());
        }
    }

    #[test]
    fn closed_form_existence_matches_scan(alpha in 1.2f64..4.0, lambda in 0.0f64..4.0) {
        let p = ConeParams::new(alpha, 1.0, Coupling::Finite(lambda)).unwrap();
        let ch = p.channel(0).unwrap();
        let bc = robin_constant(&p, &ch, Convention::Integral).boundary();
        let c = bc.constant();
        prop_assume!((c + ch.nu_abs()).abs() > 0.2);
        let roots = solve_exact(&ch, bc, &fast()).unwrap();
        let cf = closed_form_anticone(&p, &ch, Convention::Integral).unwrap();
        prop_assert_eq!(cf.state().is_some(), !roots.is_empty());
    }

    #[test]
    fn tower_is_log_periodic(alpha in 0.2f64..0.8, c in -5.0f64..5.0) {
        let ch = Channel::new(alpha, 0).unwrap();
        let roots = solve_exact(&ch, BoundaryCondition::Robin(c), &ExactOptions { n_max: 6, ..fast() }).unwrap();
        let want = (-std::f64::consts::PI / ch.nu_abs()).exp();
        for w in roots.windows(2) {
            prop_assert_eq!(w[1].branch, w[0].branch + 1);
            if w[0].kappa < 1e-3 {
                prop_assert!((w[1].kappa / w[0].kappa / want - 1.0).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn oracle_is_scale_free(a in 1e-3f64..1e3) {
        let ch = Channel::new(2.0, 0).unwrap();
        let bc = BoundaryCondition::Robin(-1.09375);
        let g = GridSpec::new(800, 1000.0, Spacing::LogSpaced).unwrap();
        let base = solve_radial_at(&ch, bc, &g, 1.0).unwrap().eigenvalues();
        let scaled = solve_radial_at(&ch, bc, &g, a).unwrap().eigenvalues();
        prop_assert_eq!(base.len(), scaled.len());
        for (x, y) in base.iter().zip(&scaled) {
            prop_assert!(((x - y) / x).abs() < 1e-6);
        }
    }
}

#[test]
fn report_json_round_trip() {
    let opts = SpectrumOptions {
        exact: ExactOptions {
            n_max: 2,
            kappa_min: 1e-5,
            ..ExactOptions::default()
        },
        ..SpectrumOptions::default()
    };
    for alpha in [0.5, 2.0] {
        let r = full_spectrum(&ConeParams::unit(alpha).unwrap(), -2..=2, &opts);
        let s = serde_json::to_string(&r).unwrap();
        let back: SpectrumReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}

#[test]
fn dirichlet_report_lists_tower_pairs() {
    let p = ConeParams::new(0.5, 1.0, Coupling::Dirichlet).unwrap();
    let opts = SpectrumOptions {
        exact: ExactOptions {
            n_max: 3,
            ..ExactOptions::default()
        },
        ..SpectrumOptions::default()
    };
    let r = full_spectrum(&p, 0..=0, &opts);
    let ch = r.channel(0).unwrap();
    assert_eq!(ch.robin_constant, None);
    assert_eq!(ch.states_by(Method::ExactBessel).count(), 3);
    assert_eq!(ch.states_by(Method::ClosedFormDirichlet).count(), 3);
    assert_eq!(ch.deviations.len(), 3);
    // The printed tower sits a constant factor below the exact zeros.
    for d in &ch.deviations {
        assert!((d.relative - 0.3594).abs() < 2e-3, "{d:?}");
    }
}
