use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// First and second phase-space moments at a given time.
///
/// `qp_sym` is the symmetrized `<qp + pq>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentState {
    pub q_mean: f64,
    pub p_mean: f64,
    pub q2: f64,
    pub p2: f64,
    pub qp_sym: f64,
    #[serde(default)]
    pub time: f64,
}

/// Means only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FirstMoments {
    pub time: f64,
    pub q_mean: f64,
    pub p_mean: f64,
}

impl MomentState {
    /// State at `t = 0` from means, variances and the covariance
    /// `cov_qp = <qp + pq>/2 - <q><p>`.
    pub fn gaussian(q_mean: f64, p_mean: f64, var_q: f64, var_p: f64, cov_qp: f64) -> Self {
        MomentState {
            q_mean,
            p_mean,
            q2: var_q + q_mean * q_mean,
            p2: var_p + p_mean * p_mean,
            qp_sym: 2.0 * (cov_qp + q_mean * p_mean),
            time: 0.0,
        }
    }

    pub fn var_q(&self) -> f64 {
        self.q2 - self.q_mean * self.q_mean
    }

    pub fn var_p(&self) -> f64 {
        self.p2 - self.p_mean * self.p_mean
    }

    pub fn cov_qp(&self) -> f64 {
        0.5 * self.qp_sym - self.q_mean * self.p_mean
    }

    /// Covariance matrix `[[var_q, cov], [cov, var_p]]`.
    pub fn covariance(&self) -> [[f64; 2]; 2] {
        let c = self.cov_qp();
        [[self.var_q(), c], [c, self.var_p()]]
    }

    /// `var_q var_p - cov^2`, the determinant of the covariance matrix.
    pub fn covariance_det(&self) -> f64 {
        self.var_q() * self.var_p() - self.cov_qp().powi(2)
    }

    pub fn kinetic_energy(&self, mass: f64) -> f64 {
        self.p2 / (2.0 * mass)
    }

    pub fn first(&self) -> FirstMoments {
        FirstMoments { time: self.time, q_mean: self.q_mean, p_mean: self.p_mean }
    }

    /// Rejects non-finite values and negative variances.
    pub fn check(&self) -> Result<()> {
        let all = [self.q_mean, self.p_mean, self.q2, self.p2, self.qp_sym, self.time];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidState("non-finite moment".into()));
        }
        if self.var_q() < 0.0 || self.var_p() < 0.0 {
            return Err(Error::InvalidState(format!(
                "negative variance (var_q = {}, var_p = {})",
                self.var_q(),
                self.var_p()
            )));
        }
        Ok(())
    }

    /// Robertson-Schroedinger bound `det Sigma >= (hbar/2)^2`, with a relative
    /// slack of 1e-12 for states constructed exactly at the bound.
    pub fn check_quantum_admissible(&self, hbar: f64) -> Result<()> {
        self.check()?;
        let floor = 0.25 * hbar * hbar;
        let det = self.covariance_det();
        if det < floor * (1.0 - 1e-12) {
            return Err(Error::InvalidState(format!(
                "covariance determinant {det:e} below the uncertainty floor {floor:e}"
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_roundtrips_central_moments() {
        let s = MomentState::gaussian(1.0, -2.0, 0.5, 0.75, 0.1);
        assert!((s.var_q() - 0.5).abs() < 1e-15);
        assert!((s.var_p() - 0.75).abs() < 1e-15);
        assert!((s.cov_qp() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn admissibility() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let min = MomentState::gaussian(1.0, 1.0, h * h, h * h, 0.0);
        assert!(min.check_quantum_admissible(1.0).is_ok());
        let squeezed_too_far = MomentState::gaussian(0.0, 0.0, 0.1, 0.1, 0.0);
        assert!(squeezed_too_far.check_quantum_admissible(1.0).is_err());
        let negative = MomentState::gaussian(0.0, 0.0, -1.0, 1.0, 0.0);
        assert!(negative.check().is_err());
    }
}
