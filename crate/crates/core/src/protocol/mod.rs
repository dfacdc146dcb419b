//! Reference-trajectory design and frequency-program synthesis.
//!
//! A protocol is fixed by a reference trajectory `u(t)` solving
//! `u'' + omega^2(t) u = 0`. Choosing `u` with the right boundary behaviour
//! makes the linear invariant `G = u p - m u' q` proportional to the momentum
//! (momentum scaling, `u'(t_b) = 0`) or to the position (position scaling,
//! `u(t_b) = 0`) at both ends of the process, and the trap program follows as
//! `omega^2 = -u''/u`.

mod frequency;
mod trajectory;
mod validation;

pub use frequency::{synthesize_omega2, FrequencyProgram, ProgramSample};
pub use trajectory::{design_momentum_trajectory, design_position_trajectory, design_trajectory, ReferenceTrajectory};
pub use validation::{validate_protocol, Residual, ValidationReport};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingMode {
    /// `G(t_b) = u(t_b) p`; final momenta are `u0/uf` times the initial ones.
    #[serde(alias = "momentum")]
    MomentumScaling,
    /// `G(t_b) = -m u'(t_b) q`; final positions are `u'0/u'f` times the initial ones.
    #[serde(alias = "position")]
    PositionScaling,
}

impl ScalingMode {
    pub fn name(self) -> &'static str {
        match self {
            ScalingMode::MomentumScaling => "momentum_scaling",
            ScalingMode::PositionScaling => "position_scaling",
        }
    }
}

/// What the user asks for: mode, scale factor and process time.
///
/// `scale_factor` is `u0/uf` in momentum mode and `u'0/u'f` in position mode.
/// Mass and hbar default to 1 (code units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingSpec {
    pub mode: ScalingMode,
    pub scale_factor: f64,
    pub t_f: f64,
    #[serde(default = "one")]
    pub u0: f64,
    #[serde(default = "one")]
    pub udot0: f64,
    #[serde(default = "one")]
    pub mass: f64,
    #[serde(default = "one")]
    pub hbar: f64,
}

fn one() -> f64 {
    1.0
}

impl ScalingSpec {
    pub fn momentum(scale_factor: f64, t_f: f64) -> Self {
        ScalingSpec {
            mode: ScalingMode::MomentumScaling,
            scale_factor,
            t_f,
            u0: 1.0,
            udot0: 1.0,
            mass: 1.0,
            hbar: 1.0,
        }
    }

    pub fn position(scale_factor: f64, t_f: f64) -> Self {
        ScalingSpec {
            mode: ScalingMode::PositionScaling,
            ..ScalingSpec::momentum(scale_factor, t_f)
        }
    }

    pub fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if !(self.t_f.is_finite() && self.t_f > 0.0) {
            return bad(format!("t_f must be positive and finite, got {}", self.t_f));
        }
        if !self.scale_factor.is_finite() || self.scale_factor == 0.0 {
            return bad(format!("scale_factor must be finite and nonzero, got {}", self.scale_factor));
        }
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return bad(format!("mass must be positive and finite, got {}", self.mass));
        }
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            return bad(format!("hbar must be positive and finite, got {}", self.hbar));
        }
        match self.mode {
            ScalingMode::MomentumScaling if !self.u0.is_finite() || self.u0 == 0.0 => {
                bad(format!("momentum mode requires finite nonzero u0, got {}", self.u0))
            }
            ScalingMode::PositionScaling if !self.udot0.is_finite() || self.udot0 == 0.0 => {
                bad(format!("position mode requires finite nonzero udot0, got {}", self.udot0))
            }
            _ => Ok(()),
        }
    }
}
