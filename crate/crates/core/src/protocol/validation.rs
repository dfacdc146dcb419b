use serde::Serialize;

use super::{FrequencyProgram, ReferenceTrajectory, ScalingMode};
use crate::moments::{self, MomentState};

const BOUNDARY_TOL: f64 = 1e-12;
const MOTION_TOL: f64 = 1e-10;
const SYMMETRY_TOL: f64 = 1e-13;
const RESIDUAL_GRID: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residual {
    pub name: &'static str,
    /// Normalized by the natural scale of the quantity (see `validate_protocol`).
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub mode: ScalingMode,
    pub boundary: Vec<Residual>,
    /// `sup |u'' + omega^2 u| / max|u''|` over points where `|u|` is not tiny.
    pub motion_residual: f64,
    /// `sup |u(t_f/2 + tau) + u(t_f/2 - tau) - u_f - u_0| / (|u_0| + |u_f|)`; momentum mode only.
    pub symmetry_defect: Option<f64>,
    pub peak_abs_omega2: f64,
    /// `max_t |<q>_t|` for the supplied initial state.
    pub max_abs_q_mean: Option<f64>,
    pub passed: bool,
    pub failures: Vec<String>,
}

/// Checks boundary conditions, the equation of motion of `u`, the quintic's
/// point symmetry and, when an initial state is given, the spatial excursion
/// of the mean position.
///
/// Boundary residuals are scaled by `|u0| + |uf|` (momentum mode) or
/// `|u'0| + |u'f|` (position mode) times the matching power of `t_f`.
pub fn validate_protocol(
    traj: &ReferenceTrajectory,
    program: &FrequencyProgram,
    initial: Option<&MomentState>,
) -> ValidationReport {
    let t_f = traj.t_f();
    let spec = traj.spec();
    let mut failures = Vec::new();

    let mut boundary = Vec::new();
    match traj.mode() {
        ScalingMode::MomentumScaling => {
            let uf = spec.u0 / spec.scale_factor;
            let scale = spec.u0.abs() + uf.abs();
            boundary.push(Residual { name: "u(0)-u0", value: (traj.u(0.0) - spec.u0).abs() / scale });
            boundary.push(Residual { name: "u(tf)-uf", value: (traj.u(t_f) - uf).abs() / scale });
            boundary.push(Residual { name: "udot(0)", value: traj.udot(0.0).abs() * t_f / scale });
            boundary.push(Residual { name: "udot(tf)", value: traj.udot(t_f).abs() * t_f / scale });
            boundary.push(Residual { name: "uddot(0)", value: traj.uddot(0.0).abs() * t_f * t_f / scale });
            boundary.push(Residual { name: "uddot(tf)", value: traj.uddot(t_f).abs() * t_f * t_f / scale });
        }
        ScalingMode::PositionScaling => {
            let vf = spec.udot0 / spec.scale_factor;
            let scale = spec.udot0.abs() + vf.abs();
            boundary.push(Residual { name: "u(0)", value: traj.u(0.0).abs() / (scale * t_f) });
            boundary.push(Residual { name: "u(tf)", value: traj.u(t_f).abs() / (scale * t_f) });
            boundary.push(Residual { name: "udot(0)-udot0", value: (traj.udot(0.0) - spec.udot0).abs() / scale });
            boundary.push(Residual { name: "udot(tf)-udotf", value: (traj.udot(t_f) - vf).abs() / scale });
            boundary.push(Residual { name: "uddot(0)", value: traj.uddot(0.0).abs() * t_f / scale });
            boundary.push(Residual { name: "uddot(tf)", value: traj.uddot(t_f).abs() * t_f / scale });
        }
    }
    boundary.push(Residual { name: "omega2(0)", value: program.omega2(0.0).abs() * t_f * t_f });
    boundary.push(Residual { name: "omega2(tf)", value: program.omega2(t_f).abs() * t_f * t_f });
    for r in &boundary {
        if !(r.value <= BOUNDARY_TOL) {
            failures.push(format!("boundary residual {} = {:e}", r.name, r.value));
        }
    }

    let motion_residual = motion_residual(traj, program);
    if !(motion_residual <= MOTION_TOL) {
        failures.push(format!("equation-of-motion residual {motion_residual:e}"));
    }

    let symmetry_defect = (traj.mode() == ScalingMode::MomentumScaling).then(|| symmetry_defect(traj));
    if let Some(d) = symmetry_defect {
        if !(d <= SYMMETRY_TOL) {
            failures.push(format!("symmetry defect {d:e}"));
        }
    }

    let peak_abs_omega2 = program.peak_abs_omega2();
    if !peak_abs_omega2.is_finite() {
        failures.push("peak |omega^2| is not finite".into());
    }

    let max_abs_q_mean = initial.and_then(|state| match moments::max_abs_q_mean(program, state, 1000) {
        Ok(v) => Some(v),
        Err(e) => {
            failures.push(format!("excursion bound: {e}"));
            None
        }
    });

    ValidationReport {
        mode: traj.mode(),
        boundary,
        motion_residual,
        symmetry_defect,
        peak_abs_omega2,
        max_abs_q_mean,
        passed: failures.is_empty(),
        failures,
    }
}

fn motion_residual(traj: &ReferenceTrajectory, program: &FrequencyProgram) -> f64 {
    let t_f = traj.t_f();
    let max_u = traj.max_abs_on_grid(0, RESIDUAL_GRID);
    let max_udd = traj.max_abs_on_grid(2, RESIDUAL_GRID);
    if max_udd == 0.0 {
        return 0.0;
    }
    (0..=RESIDUAL_GRID)
        .map(|i| t_f * i as f64 / RESIDUAL_GRID as f64)
        .filter(|&t| traj.u(t).abs() > 1e-8 * max_u)
        .map(|t| (traj.uddot(t) + program.omega2(t) * traj.u(t)).abs())
        .fold(0.0, f64::max)
        / max_udd
}

fn symmetry_defect(traj: &ReferenceTrajectory) -> f64 {
    let t_f = traj.t_f();
    let (u0, uf) = (traj.u_initial(), traj.u_final());
    let scale = u0.abs() + uf.abs();
    (0..=RESIDUAL_GRID / 2)
        .map(|i| t_f * i as f64 / RESIDUAL_GRID as f64)
        .map(|tau| (traj.u(0.5 * t_f + tau) + traj.u(0.5 * t_f - tau) - uf - u0).abs())
        .fold(0.0, f64::max)
        / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{design_trajectory, synthesize_omega2, ScalingSpec};

    fn report(spec: ScalingSpec) -> ValidationReport {
        let traj = design_trajectory(&spec).unwrap();
        let program = synthesize_omega2(&traj).unwrap();
        validate_protocol(&traj, &program, None)
    }

    #[test]
    fn identity_has_zero_residuals() {
        let r = report(ScalingSpec::momentum(1.0, 1.0));
        assert!(r.passed, "{:?}", r.failures);
        assert!(r.boundary.iter().all(|b| b.value == 0.0));
        assert_eq!(r.motion_residual, 0.0);
        assert_eq!(r.symmetry_defect, Some(0.0));
    }

    #[test]
    fn one_fifth_quintic_passes() {
        let r = report(ScalingSpec::momentum(0.2, 1.0));
        assert!(r.passed, "{:?}", r.failures);
        assert!(r.motion_residual <= 1e-12);
    }

    #[test]
    fn mirror_is_symmetric_with_clean_boundaries() {
        let r = report(ScalingSpec::momentum(-1.0, 1.0));
        assert!(r.passed, "{:?}", r.failures);
        assert!(r.symmetry_defect.unwrap() <= 1e-14);
        assert!(r.boundary.iter().all(|b| b.value <= 1e-15), "{:?}", r.boundary);
    }

    #[test]
    fn position_protocols_pass() {
        for f in [-0.5, -2.0, 1.0] {
            let r = report(ScalingSpec::position(f, 1.0));
            assert!(r.passed, "{f}: {:?}", r.failures);
            assert!(r.symmetry_defect.is_none());
        }
    }

    #[test]
    fn excursion_reported_for_initial_state() {
        let spec = ScalingSpec::momentum(0.2, 1.0);
        let traj = design_trajectory(&spec).unwrap();
        let program = synthesize_omega2(&traj).unwrap();
        let state = MomentState::gaussian(1.0, 1.0, 0.5, 0.5, 0.0);
        let r = validate_protocol(&traj, &program, Some(&state));
        let q = r.max_abs_q_mean.unwrap();
        assert!(q >= 1.0 && q < 20.0, "{q}");
    }
}
