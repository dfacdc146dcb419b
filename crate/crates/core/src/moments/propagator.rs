use serde::Serialize;

use super::state::{FirstMoments, MomentState};
use crate::error::{Error, Result};
use crate::ode::{self, Tolerance};
use crate::protocol::{FrequencyProgram, ScalingMode};

/// Linear phase-space map `(q, p)_0 -> (q, p)_t` of the classical equations
/// of motion under `omega^2(t)`.
///
/// Columns are `(v1, m v1')` and `(v2/m, v2')` with `v1(0) = 1, v1'(0) = 0`
/// and `v2(0) = 0, v2'(0) = 1`, both solving `v'' + omega^2 v = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovariancePropagator {
    pub matrix: [[f64; 2]; 2],
    pub time: f64,
}

impl CovariancePropagator {
    pub fn identity() -> Self {
        CovariancePropagator { matrix: [[1.0, 0.0], [0.0, 1.0]], time: 0.0 }
    }

    pub fn det(&self) -> f64 {
        let m = &self.matrix;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn apply(&self, q: f64, p: f64) -> (f64, f64) {
        let m = &self.matrix;
        (m[0][0] * q + m[0][1] * p, m[1][0] * q + m[1][1] * p)
    }
}

/// Propagator at a single time `t` in `[0, t_f]`.
pub fn fundamental_matrix(program: &FrequencyProgram, t: f64) -> Result<CovariancePropagator> {
    Ok(fundamental_matrices(program, &[t])?.remove(0))
}

/// Propagators at sorted times in `[0, t_f]`, from one integration pass.
///
/// The reference trajectory is itself an exact solution of the equation of
/// motion, so the column it spans is evaluated in closed form (`v1 = u/u0` in
/// momentum mode, `v2 = u/u'0` in position mode) and only the complementary
/// solution is integrated numerically. At `t_f` that column takes the
/// boundary values the trajectory was designed to hit, so the final map is
/// free of the rounding in summing the polynomial.
pub fn fundamental_matrices(program: &FrequencyProgram, times: &[f64]) -> Result<Vec<CovariancePropagator>> {
    check_times(program, times)?;
    let traj = program.trajectory();
    let t_f = program.t_f();
    let m = traj.mass();
    let s_times: Vec<f64> = times.iter().map(|t| t / t_f).collect();
    let rhs = |s: f64, y: &[f64; 2]| [y[1], -program.omega2_s(s) * y[0]];

    match traj.mode() {
        ScalingMode::MomentumScaling => {
            let u0 = traj.u_initial();
            let y2 = ode::integrate(rhs, 0.0, [0.0, 1.0], &s_times, Tolerance::default())?;
            Ok(times
                .iter()
                .zip(y2)
                .map(|(&t, y)| {
                    let (v1, v1dot) = if t == t_f {
                        (1.0 / traj.scale_factor(), 0.0)
                    } else {
                        (traj.u(t) / u0, traj.udot(t) / u0)
                    };
                    let (v2, v2dot) = (t_f * y[0], y[1]);
                    CovariancePropagator { matrix: [[v1, v2 / m], [m * v1dot, v2dot]], time: t }
                })
                .collect())
        }
        ScalingMode::PositionScaling => {
            let w0 = traj.udot_initial();
            let y1 = ode::integrate(rhs, 0.0, [1.0, 0.0], &s_times, Tolerance::default())?;
            Ok(times
                .iter()
                .zip(y1)
                .map(|(&t, y)| {
                    let (v1, v1dot) = (y[0], y[1] / t_f);
                    let (v2, v2dot) = if t == t_f {
                        (0.0, 1.0 / traj.scale_factor())
                    } else {
                        (traj.u(t) / w0, traj.udot(t) / w0)
                    };
                    CovariancePropagator { matrix: [[v1, v2 / m], [m * v1dot, v2dot]], time: t }
                })
                .collect())
        }
    }
}

/// Both columns integrated numerically, with no use of the reference
/// trajectory beyond `omega^2`. Independent route used for cross-checks.
pub fn fundamental_matrices_numeric(
    program: &FrequencyProgram,
    times: &[f64],
) -> Result<Vec<CovariancePropagator>> {
    check_times(program, times)?;
    let t_f = program.t_f();
    let m = program.trajectory().mass();
    let s_times: Vec<f64> = times.iter().map(|t| t / t_f).collect();
    let rhs = |s: f64, y: &[f64; 4]| {
        let w2 = program.omega2_s(s);
        [y[1], -w2 * y[0], y[3], -w2 * y[2]]
    };
    let ys = ode::integrate(rhs, 0.0, [1.0, 0.0, 0.0, 1.0], &s_times, Tolerance::default())?;
    Ok(times
        .iter()
        .zip(ys)
        .map(|(&t, y)| CovariancePropagator {
            matrix: [[y[0], t_f * y[2] / m], [m * y[1] / t_f, y[3]]],
            time: t,
        })
        .collect())
}

fn check_times(program: &FrequencyProgram, times: &[f64]) -> Result<()> {
    let t_f = program.t_f();
    for &t in times {
        if !(0.0..=t_f).contains(&t) {
            return Err(Error::TimeOutOfRange { t, t_f });
        }
    }
    Ok(())
}

/// `(<q>, <p>)_t = M (<q>, <p>)_0`.
pub fn propagate_first_moments(m: &CovariancePropagator, initial: &MomentState) -> FirstMoments {
    let (q, p) = m.apply(initial.q_mean, initial.p_mean);
    FirstMoments { time: m.time, q_mean: q, p_mean: p }
}

/// Full moment propagation: means by `M`, raw second moments by the
/// congruence `S_t = M S_0 M^T` of the matrix `[[<q^2>, <qp+pq>/2], [., <p^2>]]`.
pub fn propagate_second_moments(m: &CovariancePropagator, initial: &MomentState) -> MomentState {
    let [[a, b], [c, d]] = m.matrix;
    let (q, p) = m.apply(initial.q_mean, initial.p_mean);
    let (xx, pp, xp) = (initial.q2, initial.p2, 0.5 * initial.qp_sym);
    MomentState {
        q_mean: q,
        p_mean: p,
        q2: a * a * xx + 2.0 * a * b * xp + b * b * pp,
        p2: c * c * xx + 2.0 * c * d * xp + d * d * pp,
        qp_sym: 2.0 * (a * c * xx + (a * d + b * c) * xp + b * d * pp),
        time: m.time,
    }
}
