//! Quadrature forms of the moment evolution.
//!
//! These divide by `u` (momentum mode) or `u'` (position mode) and so only
//! hold on intervals where that function has no zero. They serve as an
//! independent check of the fundamental-matrix propagation.

use serde::Serialize;

use super::propagator::fundamental_matrix;
use super::state::{FirstMoments, MomentState};
use crate::error::{Error, Result};
use crate::protocol::{FrequencyProgram, ReferenceTrajectory, ScalingMode};
use crate::quadrature;

const QUAD_RTOL: f64 = 1e-10;

/// `U_t = u_t/u_0`, its time derivative, `I_t = int_0^t u_0^2/u^2` and
/// `A_t = 1 + U_t U'_t I_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentumIntegrals {
    pub time: f64,
    pub u_ratio: f64,
    pub u_ratio_dot: f64,
    pub i_t: f64,
    pub a_t: f64,
}

/// The mode-appropriate quadrature integrals at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum QuadratureIntegrals {
    Momentum(MomentumIntegrals),
    /// `J_t = int_0^t omega^2 u'_0^2 / u'^2`.
    Position { time: f64, j_t: f64 },
}

pub fn quadrature_integrals(program: &FrequencyProgram, t: f64) -> Result<QuadratureIntegrals> {
    match program.trajectory().mode() {
        ScalingMode::MomentumScaling => {
            momentum_integrals(program.trajectory(), t).map(QuadratureIntegrals::Momentum)
        }
        ScalingMode::PositionScaling => Ok(QuadratureIntegrals::Position { time: t, j_t: position_integral(program, t)? }),
    }
}

pub fn momentum_integrals(traj: &ReferenceTrajectory, t: f64) -> Result<MomentumIntegrals> {
    check_range(traj, t)?;
    if let Some(t0) = first_zero(traj, 0, t) {
        return Err(Error::SingularIntegrand { which: "u", t: t0 });
    }
    let u0 = traj.u_initial();
    let i_t = quadrature::integrate(
        |tp| {
            let r = traj.u(tp) / u0;
            1.0 / (r * r)
        },
        0.0,
        t,
        QUAD_RTOL,
        0.0,
    )?;
    let u_ratio = traj.u(t) / u0;
    let u_ratio_dot = traj.udot(t) / u0;
    Ok(MomentumIntegrals { time: t, u_ratio, u_ratio_dot, i_t, a_t: 1.0 + u_ratio * u_ratio_dot * i_t })
}

/// `I_t` continued through nodes of `u` by `U_t I_t = m M12(t)`, which the
/// fundamental matrix supplies. Equals the quadrature value before the first node.
pub fn continued_momentum_integral(program: &FrequencyProgram, t: f64) -> Result<f64> {
    let traj = program.trajectory();
    match momentum_integrals(traj, t) {
        Ok(q) => Ok(q.i_t),
        Err(Error::SingularIntegrand { .. }) => {
            let u_ratio = traj.u(t) / traj.u_initial();
            if u_ratio == 0.0 {
                return Err(Error::MirrorNode { t, u_abs: 0.0 });
            }
            Ok(traj.mass() * fundamental_matrix(program, t)?.matrix[0][1] / u_ratio)
        }
        Err(e) => Err(e),
    }
}

/// `J_t`, defined while `u'` keeps the sign it has at `t = 0`.
pub fn position_integral(program: &FrequencyProgram, t: f64) -> Result<f64> {
    let traj = program.trajectory();
    check_range(traj, t)?;
    if let Some(t0) = first_zero(traj, 1, t) {
        return Err(Error::SingularIntegrand { which: "udot", t: t0 });
    }
    let w0 = traj.udot_initial();
    quadrature::integrate(
        |tp| {
            let r = traj.udot(tp) / w0;
            program.omega2(tp) / (r * r)
        },
        0.0,
        t,
        QUAD_RTOL,
        1e-300,
    )
}

/// Moments from the closed-form momentum-mode expressions (first moments,
/// `<q^2>`, `<qp+pq>` and `<p^2>`).
pub fn closed_form_momentum_moments(program: &FrequencyProgram, t: f64, initial: &MomentState) -> Result<MomentState> {
    let m = program.trajectory().mass();
    let MomentumIntegrals { u_ratio: u, u_ratio_dot: ud, i_t: i, a_t: a, .. } = momentum_integrals(program.trajectory(), t)?;
    let (q0, p0) = (initial.q_mean, initial.p_mean);
    let (q2, p2, qp) = (initial.q2, initial.p2, initial.qp_sym);
    Ok(MomentState {
        q_mean: q0 * u + p0 * u * i / m,
        p_mean: q0 * m * ud + p0 * a / u,
        q2: p2 * (u * i / m).powi(2) + qp * u * u * i / m + q2 * u * u,
        qp_sym: qp * (1.0 + 2.0 * ud * u * i) + p2 * 2.0 * i * a / m + q2 * 2.0 * m * u * ud,
        p2: p2 * a * a / (u * u) + qp * m * ud * a / u + q2 * (m * ud).powi(2),
        time: t,
    })
}

/// Position-mode means from the `J_t` expressions; falls back to the
/// fundamental matrix once `u'` has crossed zero.
pub fn position_mode_first_moments(program: &FrequencyProgram, t: f64, initial: &MomentState) -> Result<FirstMoments> {
    let traj = program.trajectory();
    if traj.mode() != ScalingMode::PositionScaling {
        return Err(Error::ModeMismatch { expected: ScalingMode::PositionScaling.name(), got: traj.mode().name() });
    }
    match position_integral(program, t) {
        Ok(j) => {
            let m = traj.mass();
            let w0 = traj.udot_initial();
            let (wt, ut) = (traj.udot(t), traj.u(t));
            let (q0, p0) = (initial.q_mean, initial.p_mean);
            Ok(FirstMoments {
                time: t,
                p_mean: (-m * j * q0 + p0) * wt / w0,
                q_mean: p0 * ut / (m * w0) + q0 * (w0 / wt - ut / w0 * j),
            })
        }
        Err(Error::SingularIntegrand { .. }) => {
            let mat = fundamental_matrix(program, t)?;
            Ok(super::propagate_first_moments(&mat, initial))
        }
        Err(e) => Err(e),
    }
}

fn check_range(traj: &ReferenceTrajectory, t: f64) -> Result<()> {
    let t_f = traj.t_f();
    if !(0.0..=t_f).contains(&t) {
        return Err(Error::TimeOutOfRange { t, t_f });
    }
    Ok(())
}

/// First zero of the `k`-th derivative of `u` in `[0, t]`, in physical time.
fn first_zero(traj: &ReferenceTrajectory, k: usize, t: f64) -> Option<f64> {
    let t_f = traj.t_f();
    let p = traj.poly_s().nth_derivative(k);
    if p.is_zero() {
        return Some(0.0);
    }
    p.real_roots(0.0, t / t_f, 1e-12).first().map(|&(s, _)| s * t_f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{fundamental_matrices, propagate_second_moments};
    use crate::protocol::{design_trajectory, synthesize_omega2, ScalingSpec};

    fn program(spec: ScalingSpec) -> FrequencyProgram {
        synthesize_omega2(&design_trajectory(&spec).unwrap()).unwrap()
    }

    #[test]
    fn identity_integrals() {
        let p = program(ScalingSpec::momentum(1.0, 2.0));
        let q = momentum_integrals(p.trajectory(), 1.3).unwrap();
        assert!((q.i_t - 1.3).abs() < 1e-14);
        assert_eq!(q.a_t, 1.0);
        assert_eq!(q.u_ratio, 1.0);
    }

    #[test]
    fn one_fifth_final_integral_matches_matrix() {
        let p = program(ScalingSpec::momentum(0.2, 1.0));
        let q = momentum_integrals(p.trajectory(), 1.0).unwrap();
        let m = fundamental_matrix(&p, 1.0).unwrap();
        // M12 * m = U_f I_f
        assert!((m.matrix[0][1] - q.u_ratio * q.i_t).abs() < 1e-10 * q.i_t.abs());
        assert!((q.a_t - 1.0).abs() < 1e-12);
    }

    #[test]
    fn continued_integral_past_mirror_node() {
        let p = program(ScalingSpec::momentum(-1.0, 1.0));
        let before = continued_momentum_integral(&p, 0.3).unwrap();
        assert_eq!(before, momentum_integrals(p.trajectory(), 0.3).unwrap().i_t);
        // I_t diverges to +inf at the node and returns from -inf
        let after = continued_momentum_integral(&p, 0.7).unwrap();
        assert!(after < 0.0, "{after}");
        assert!(continued_momentum_integral(&p, 1.0).unwrap().is_finite());
    }

    #[test]
    fn mirror_integral_is_singular_past_node() {
        let p = program(ScalingSpec::momentum(-1.0, 1.0));
        assert!(momentum_integrals(p.trajectory(), 0.4).is_ok());
        match momentum_integrals(p.trajectory(), 0.5) {
            Err(Error::SingularIntegrand { which: "u", t }) => assert!((t - 0.5).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert!(momentum_integrals(p.trajectory(), 0.9).is_err());
    }

    #[test]
    fn closed_form_matches_matrix_route() {
        let init = MomentState::gaussian(1.0, 1.0, 0.5, 0.5, 0.1);
        for spec in [ScalingSpec::momentum(0.2, 1.0), ScalingSpec::momentum(5.0, 1.0), ScalingSpec::momentum(-1.0, 1.0)] {
            let p = program(spec);
            let times: Vec<f64> = (0..=24).map(|i| i as f64 / 24.0).collect();
            let mats = fundamental_matrices(&p, &times).unwrap();
            for m in mats {
                let Ok(cf) = closed_form_momentum_moments(&p, m.time, &init) else {
                    assert!(spec.scale_factor < 0.0 && m.time >= 0.5);
                    continue;
                };
                let ode = propagate_second_moments(&m, &init);
                for (a, b) in [(cf.q_mean, ode.q_mean), (cf.p_mean, ode.p_mean), (cf.q2, ode.q2), (cf.p2, ode.p2), (cf.qp_sym, ode.qp_sym)] {
                    assert!((a - b).abs() <= 1e-8 * (1.0 + b.abs()), "{spec:?} t={}: {a} vs {b}", m.time);
                }
            }
        }
    }

    #[test]
    fn position_first_moments_scale_final_position() {
        for (f, expected) in [(-0.5, -0.5), (-2.0, -2.0)] {
            let p = program(ScalingSpec::position(f, 1.0));
            let init = MomentState::gaussian(1.0, 1.0, 0.5, 0.5, 0.0);
            let zero = position_mode_first_moments(&p, 0.0, &init).unwrap();
            assert_eq!((zero.q_mean, zero.p_mean), (1.0, 1.0));
            let fin = position_mode_first_moments(&p, 1.0, &init).unwrap();
            assert!((fin.q_mean - expected).abs() < 1e-9, "{f}: {}", fin.q_mean);
        }
    }

    #[test]
    fn position_closed_form_agrees_before_turning_point() {
        let p = program(ScalingSpec::position(-0.5, 1.0));
        let t_turn = first_zero(p.trajectory(), 1, 1.0).unwrap();
        let init = MomentState::gaussian(0.7, -0.3, 0.5, 0.5, 0.0);
        for i in 1..=10 {
            let t = 0.95 * t_turn * i as f64 / 10.0;
            let cf = position_mode_first_moments(&p, t, &init).unwrap();
            let ode = super::super::propagate_first_moments(&fundamental_matrix(&p, t).unwrap(), &init);
            assert!((cf.q_mean - ode.q_mean).abs() < 1e-8, "t={t}");
            assert!((cf.p_mean - ode.p_mean).abs() < 1e-8 * (1.0 + ode.p_mean.abs()), "t={t}");
        }
        assert!(matches!(position_integral(&p, 1.0), Err(Error::SingularIntegrand { which: "udot", .. })));
    }
}
