//! Conversion between physical and dimensionless variables.
//!
//! With `l = sqrt(hbar t_f / m)`: `Q = q/l`, `P = p l/hbar`, `s = t/t_f`,
//! `Omega = t_f omega`. In these variables `m = hbar = t_f = 1`.

use serde::Serialize;

use crate::moments::MomentState;
use crate::protocol::ScalingSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CodeUnits {
    pub mass: f64,
    pub hbar: f64,
    pub t_f: f64,
}

impl CodeUnits {
    pub fn from_spec(spec: &ScalingSpec) -> Self {
        CodeUnits { mass: spec.mass, hbar: spec.hbar, t_f: spec.t_f }
    }

    pub fn length(&self) -> f64 {
        (self.hbar * self.t_f / self.mass).sqrt()
    }

    pub fn momentum(&self) -> f64 {
        self.hbar / self.length()
    }

    pub fn q_to_code(&self, q: f64) -> f64 {
        q / self.length()
    }

    pub fn p_to_code(&self, p: f64) -> f64 {
        p / self.momentum()
    }

    pub fn q_from_code(&self, q: f64) -> f64 {
        q * self.length()
    }

    pub fn p_from_code(&self, p: f64) -> f64 {
        p * self.momentum()
    }

    pub fn t_to_code(&self, t: f64) -> f64 {
        t / self.t_f
    }

    pub fn omega2_to_code(&self, omega2: f64) -> f64 {
        omega2 * self.t_f * self.t_f
    }

    pub fn state_to_code(&self, s: &MomentState) -> MomentState {
        let (l, k) = (self.length(), self.momentum());
        MomentState {
            q_mean: s.q_mean / l,
            p_mean: s.p_mean / k,
            q2: s.q2 / (l * l),
            p2: s.p2 / (k * k),
            qp_sym: s.qp_sym / (l * k),
            time: s.time / self.t_f,
        }
    }

    pub fn state_from_code(&self, s: &MomentState) -> MomentState {
        let (l, k) = (self.length(), self.momentum());
        MomentState {
            q_mean: s.q_mean * l,
            p_mean: s.p_mean * k,
            q2: s.q2 * l * l,
            p2: s.p2 * k * k,
            qp_sym: s.qp_sym * l * k,
            time: s.time * self.t_f,
        }
    }
}
