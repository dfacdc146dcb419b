//! Harmonic-trap frequency programs that scale momentum or position by a
//! prescribed factor for every initial state, and three independent ways of
//! checking them: moment propagation, wave-packet simulation on a grid, and
//! classical phase-space ensembles.

pub mod csim;
pub mod error;
pub mod moments;
pub mod ode;
pub mod poly;
pub mod protocol;
pub mod qsim;
pub mod quadrature;
pub mod units;

pub use error::{Error, Result};
pub use moments::{CovariancePropagator, InvariantRecord, MomentState};
pub use protocol::{
    design_momentum_trajectory, design_position_trajectory, design_trajectory, synthesize_omega2,
    validate_protocol, FrequencyProgram, ReferenceTrajectory, ScalingMode, ScalingSpec, ValidationReport,
};
pub use units::CodeUnits;
