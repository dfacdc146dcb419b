//! Wave-packet simulation in code units (`m = hbar = t_f = 1`).
//!
//! `i dPsi/ds = [P^2/2 + Omega^2(s) Q^2/2] Psi` on a periodic grid, with
//! expectation values, an eigenbasis reconstruction used as an independent
//! oracle, and the Wigner transform.

mod eigenbasis;
mod grid;
mod split_step;
mod wavefunction;
mod wigner;

pub use eigenbasis::{eigen_data, invariant_eigenfunction, reconstruct_via_expansion, EigenData, MIRROR_NODE_THRESHOLD};
pub use grid::GridSpec;
pub use split_step::{propagate, Propagation, SplitStep, StabilityWarning, EDGE_CELLS, EDGE_PROBABILITY_LIMIT};
pub use wavefunction::{gaussian_state, measure_moments, WaveFunction};
pub use wigner::{wigner, WignerGrid, WignerOptions};

use crate::moments::{InvariantRecord, MomentState};
use crate::protocol::ReferenceTrajectory;

/// `<G> = U <P> - U' <Q>` and `<I>` in code units, with `U = u/u0` (or
/// `u/(t_f u'0)` in position mode) and `U' = dU/ds`.
pub fn code_invariants(traj: &ReferenceTrajectory, state: &MomentState) -> InvariantRecord {
    let t_f = traj.t_f();
    let scale = match traj.mode() {
        crate::protocol::ScalingMode::MomentumScaling => traj.u_initial(),
        crate::protocol::ScalingMode::PositionScaling => traj.udot_initial() * t_f,
    };
    let t = state.time * t_f;
    let u = traj.u(t) / scale;
    let ud = traj.udot(t) * t_f / scale;
    InvariantRecord {
        g_mean: u * state.p_mean - ud * state.q_mean,
        i_mean: 0.5 * u * u * state.p2 + 0.5 * ud * ud * state.q2 - 0.5 * u * ud * state.qp_sym,
        time: state.time,
    }
}
