use hscaler::moments::{fundamental_matrices, fundamental_matrix, propagate_second_moments, MomentState};
use hscaler::{design_trajectory, synthesize_omega2, validate_protocol, Error, ScalingSpec};
use proptest::prelude::*;

/// Momentum factors whose quintic has no genuine singularity: positive
/// factors, and `-1` (the only negative one whose node is removable).
fn momentum_factor() -> impl Strategy<Value = f64> {
    prop_oneof![0.05f64..20.0, Just(-1.0)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn quintic_is_point_symmetric(f in momentum_factor(), t_f in 0.1f64..10.0, u0 in 0.2f64..5.0) {
        let spec = ScalingSpec { u0, ..ScalingSpec::momentum(f, t_f) };
        let traj = design_trajectory(&spec).unwrap();
        let program = synthesize_omega2(&traj).unwrap();
        let r = validate_protocol(&traj, &program, None);
        prop_assert!(r.symmetry_defect.unwrap() <= 1e-13, "{:?}", r.symmetry_defect);
        prop_assert!(r.passed, "{:?}", r.failures);
    }

    #[test]
    fn fundamental_matrix_is_symplectic(f in momentum_factor(), t_f in 0.2f64..5.0, mass in 0.1f64..10.0) {
        let spec = ScalingSpec { mass, ..ScalingSpec::momentum(f, t_f) };
        let program = synthesize_omega2(&design_trajectory(&spec).unwrap()).unwrap();
        let times: Vec<f64> = (0..=16).map(|i| t_f * i as f64 / 16.0).collect();
        for m in fundamental_matrices(&program, &times).unwrap() {
            prop_assert!((m.det() - 1.0).abs() <= 1e-10, "t={} det={}", m.time, m.det());
        }
        let fin = fundamental_matrix(&program, t_f).unwrap();
        prop_assert_eq!(fin.matrix[1][0], 0.0);
        prop_assert!((fin.matrix[1][1] - f).abs() <= 1e-10 * f.abs());
    }

    #[test]
    fn momentum_law_holds_for_any_gaussian(
        f in momentum_factor(),
        q in -5.0f64..5.0, p in -5.0f64..5.0,
        vq in 0.1f64..4.0, vp in 0.1f64..4.0, rho in -0.9f64..0.9,
    ) {
        let cov = rho * (vq * vp).sqrt();
        let init = MomentState::gaussian(q, p, vq, vp, cov);
        let program = synthesize_omega2(&design_trajectory(&ScalingSpec::momentum(f, 1.0)).unwrap()).unwrap();
        let fin = propagate_second_moments(&fundamental_matrix(&program, 1.0).unwrap(), &init);
        prop_assert!((fin.p_mean - f * p).abs() <= 1e-10 * (1.0 + (f * p).abs()));
        prop_assert!((fin.var_p() - f * f * vp).abs() <= 1e-10 * f * f * vp);
        prop_assert!((fin.p2 - f * f * init.p2).abs() <= 1e-10 * f * f * init.p2);
    }

    #[test]
    fn position_law_holds_for_any_gaussian(
        f in prop_oneof![Just(-0.5), Just(-2.0), Just(1.0)],
        q in -5.0f64..5.0, p in -5.0f64..5.0,
        vq in 0.1f64..4.0, vp in 0.1f64..4.0, rho in -0.9f64..0.9,
    ) {
        let cov = rho * (vq * vp).sqrt();
        let init = MomentState::gaussian(q, p, vq, vp, cov);
        let program = synthesize_omega2(&design_trajectory(&ScalingSpec::position(f, 1.0)).unwrap()).unwrap();
        let fin = propagate_second_moments(&fundamental_matrix(&program, 1.0).unwrap(), &init);
        let scale = f;
        prop_assert!((fin.q_mean - scale * q).abs() <= 1e-9 * (1.0 + (scale * q).abs()));
        prop_assert!((fin.var_q() - scale * scale * vq).abs() <= 1e-9 * scale * scale * vq);
    }

    #[test]
    fn negative_momentum_factors_other_than_mirror_are_singular(f in -20.0f64..-0.05) {
        prop_assume!((f + 1.0).abs() > 1e-6);
        let traj = design_trajectory(&ScalingSpec::momentum(f, 1.0)).unwrap();
        let is_singular = matches!(synthesize_omega2(&traj), Err(Error::GenuineSingularity { .. }));
        prop_assert!(is_singular);
    }
}
