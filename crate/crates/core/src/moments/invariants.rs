use serde::Serialize;

use super::state::MomentState;
use crate::protocol::ReferenceTrajectory;

/// Expectation values of the linear and quadratic invariants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvariantRecord {
    /// `<G> = u <p> - m u' <q>`.
    pub g_mean: f64,
    /// `<I> = u^2 <p^2>/2m + m u'^2 <q^2>/2 - u u' <qp+pq>/2`.
    pub i_mean: f64,
    pub time: f64,
}

/// `<G>` and `<I>` evaluated with `u(t)`, `u'(t)` at `state.time`.
pub fn invariant_expectations(traj: &ReferenceTrajectory, state: &MomentState) -> InvariantRecord {
    let m = traj.mass();
    let u = traj.u(state.time);
    let ud = traj.udot(state.time);
    InvariantRecord {
        g_mean: u * state.p_mean - m * ud * state.q_mean,
        i_mean: u * u * state.p2 / (2.0 * m) + 0.5 * m * ud * ud * state.q2 - 0.5 * u * ud * state.qp_sym,
        time: state.time,
    }
}
