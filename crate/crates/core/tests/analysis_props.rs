mod common;

use std::f64::consts::PI;

use common::*;
use lambda_sim::{
    classify_regime, design_pulses, propagate_full, superposition_report, Amplitudes, IntegratorConfig, RegimeLabel,
};
use proptest::prelude::*;

const ANGLES: [f64; 5] = [PI / 8.0, PI / 6.0, PI / 4.0, PI / 3.0, 3.0 * PI / 8.0];

/// (Ω₀T, ΓT) points where the bright state is fully drained.
const STRONG_DECAY: [(f64, f64); 4] = [(10.0, 10.0), (20.0, 20.0), (10.0, 20.0), (20.0, 10.0)];

#[test]
fn strong_decay_leaves_the_normalized_dark_state() {
    let cfg = IntegratorConfig::default();
    for (omega0, gamma) in STRONG_DECAY {
        for theta in ANGLES {
            let params = gaussian(omega0, gamma, 0.0, theta);
            let record = propagate_full(&params, Amplitudes::ground(), &cfg).unwrap();
            let report = superposition_report(&record, params.mixing_angle().unwrap()).unwrap();
            let (c2, s2) = (theta.cos().powi(2), theta.sin().powi(2));
            let case = format!("Ω₀={omega0} Γ={gamma} θ={theta:.4}");
            assert!(
                (report.p1_final - c2 * c2).abs() < 0.01,
                "{case}: p1 {}",
                report.p1_final
            );
            assert!(
                (report.p3_final - s2 * c2).abs() < 0.01,
                "{case}: p3 {}",
                report.p3_final
            );
            assert!(
                (report.postselected_p1 - c2).abs() < 0.01,
                "{case}: {}",
                report.postselected_p1
            );
            assert!(
                (report.postselected_p3 - s2).abs() < 0.01,
                "{case}: {}",
                report.postselected_p3
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn designed_pulses_reproduce_the_target(a in 0.05f64..1.0, b in -1.0f64..1.0, a_sign in prop::bool::ANY) {
        let a = if a_sign { a } else { -a };
        let design = design_pulses(a, b).unwrap();
        let params = gaussian(20.0, 20.0, 0.0, design.theta.radians());
        let record = propagate_full(&params, Amplitudes::ground(), &IntegratorConfig::default()).unwrap();
        let report = superposition_report(&record, design.theta).unwrap();
        let norm = a * a + b * b;
        prop_assert!((report.postselected_p1 - a * a / norm).abs() < 0.01);
        prop_assert!((report.postselected_p3 - b * b / norm).abs() < 0.01);
        prop_assert!((report.p1_final + report.p3_final - design.success_probability).abs() < 0.01);
    }

    #[test]
    fn robust_label_survives_one_percent_perturbation(omega0 in 10.0f64..20.0, gamma in 10.0f64..20.0) {
        let cfg = IntegratorConfig::default();
        let label = |o: f64, g: f64| {
            let params = gaussian(o, g, 0.0, PI / 4.0);
            let record = propagate_full(&params, Amplitudes::ground(), &cfg).unwrap();
            classify_regime(&params, &record).unwrap()
        };
        prop_assert_eq!(label(omega0, gamma), RegimeLabel::Robust);
        for (ko, kg) in [(1.01, 1.0), (0.99, 1.0), (1.0, 1.01), (1.0, 0.99), (1.01, 1.01), (0.99, 0.99)] {
            prop_assert_eq!(label(omega0 * ko, gamma * kg), RegimeLabel::Robust);
        }
    }
}

#[test]
fn regime_classification_is_deterministic() {
    let cfg = IntegratorConfig::default();
    for (omega0, gamma) in [(10.0, 10.0), (10.0, 0.1), (1.0, 200.0)] {
        let params = gaussian(omega0, gamma, 0.0, PI / 4.0);
        let first = classify_regime(&params, &propagate_full(&params, Amplitudes::ground(), &cfg).unwrap());
        let second = classify_regime(&params, &propagate_full(&params, Amplitudes::ground(), &cfg).unwrap());
        assert_eq!(first, second);
    }
}

#[test]
fn regime_examples() {
    let cfg = IntegratorConfig::default();
    let label = |omega0: f64, gamma: f64| {
        let params = gaussian(omega0, gamma, 0.0, PI / 4.0);
        classify_regime(&params, &propagate_full(&params, Amplitudes::ground(), &cfg).unwrap()).unwrap()
    };
    assert_eq!(label(10.0, 10.0), RegimeLabel::Robust);
    assert_eq!(label(10.0, 0.1), RegimeLabel::Oscillatory);
    assert_eq!(label(1.0, 200.0), RegimeLabel::Overdamped);
}
