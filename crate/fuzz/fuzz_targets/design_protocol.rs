#![no_main]

use hscaler::{design_trajectory, synthesize_omega2, validate_protocol, ScalingMode, ScalingSpec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|input: (bool, f64, f64, f64, f64, f64)| {
    let (position, scale_factor, t_f, u0, udot0, mass) = input;
    let mode = if position { ScalingMode::PositionScaling } else { ScalingMode::MomentumScaling };
    let spec = ScalingSpec { mode, scale_factor, t_f, u0, udot0, mass, hbar: 1.0 };
    let Ok(traj) = design_trajectory(&spec) else { return };
    let Ok(program) = synthesize_omega2(&traj) else { return };
    for k in 0..=64 {
        let w = program.omega2_s(k as f64 / 64.0);
        assert!(w.is_finite(), "omega^2 not finite at s={} for {spec:?}", k as f64 / 64.0);
    }
    let _ = validate_protocol(&traj, &program, None);
});
