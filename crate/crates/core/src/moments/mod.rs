//! Phase-space moment propagation.
//!
//! The primary route is the fundamental matrix of the classical equation of
//! motion, which stays finite through nodes of `u`. The quadrature forms in
//! [`closed_form`] are kept as an independent check.

pub mod closed_form;
mod invariants;
mod propagator;
mod state;

pub use closed_form::{
    closed_form_momentum_moments, continued_momentum_integral, momentum_integrals, position_integral, position_mode_first_moments,
    quadrature_integrals, MomentumIntegrals, QuadratureIntegrals,
};
pub use invariants::{invariant_expectations, InvariantRecord};
pub use propagator::{
    fundamental_matrices, fundamental_matrices_numeric, fundamental_matrix, propagate_first_moments,
    propagate_second_moments, CovariancePropagator,
};
pub use state::{FirstMoments, MomentState};

use crate::error::Result;
use crate::protocol::FrequencyProgram;

/// Uniform times `0, t_f/n, ..., t_f`.
pub fn uniform_times(t_f: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    (0..=n).map(|i| if i == n { t_f } else { t_f * i as f64 / n as f64 }).collect()
}

/// Moments and invariants at `n + 1` uniform times.
pub fn tabulate(program: &FrequencyProgram, initial: &MomentState, n: usize) -> Result<Vec<(MomentState, InvariantRecord)>> {
    initial.check()?;
    let times = uniform_times(program.t_f(), n);
    let mats = fundamental_matrices(program, &times)?;
    Ok(mats
        .iter()
        .map(|m| {
            let s = propagate_second_moments(m, initial);
            (s, invariant_expectations(program.trajectory(), &s))
        })
        .collect())
}

/// `max_t |<q>_t|` over `n + 1` uniform times.
pub fn max_abs_q_mean(program: &FrequencyProgram, initial: &MomentState, n: usize) -> Result<f64> {
    let times = uniform_times(program.t_f(), n);
    let mats = fundamental_matrices(program, &times)?;
    Ok(mats
        .iter()
        .map(|m| propagate_first_moments(m, initial).q_mean.abs())
        .fold(0.0, f64::max))
}
