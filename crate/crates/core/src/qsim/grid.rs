use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic grid in the dimensionless position `Q`, with the
/// conjugate momentum grid `P_k = 2 pi k / (N dQ)`, `k = -N/2 .. N/2 - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    pub n_points: usize,
    pub q_min: f64,
    pub q_max: f64,
    /// Upper bound on the split-step time step (in `s`).
    pub dt: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { n_points: 2048, q_min: -40.0, q_max: 40.0, dt: 2e-4 }
    }
}

impl GridSpec {
    pub fn check(&self) -> Result<()> {
        if self.n_points < 16 || !self.n_points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("n_points must be a power of two >= 16, got {}", self.n_points)));
        }
        if !(self.q_min.is_finite() && self.q_max.is_finite() && self.q_max > self.q_min) {
            return Err(Error::InvalidGrid(format!("need q_max > q_min, got [{}, {})", self.q_min, self.q_max)));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidGrid(format!("dt must be positive, got {}", self.dt)));
        }
        Ok(())
    }

    pub fn dq(&self) -> f64 {
        (self.q_max - self.q_min) / self.n_points as f64
    }

    pub fn dp(&self) -> f64 {
        2.0 * PI / (self.q_max - self.q_min)
    }

    /// Largest representable momentum, `pi / dQ`.
    pub fn p_max(&self) -> f64 {
        PI / self.dq()
    }

    pub fn q(&self, j: usize) -> f64 {
        self.q_min + j as f64 * self.dq()
    }

    pub fn q_points(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.q(j)).collect()
    }

    /// Momentum of FFT bin `k` (standard, unshifted order).
    pub fn p(&self, k: usize) -> f64 {
        let n = self.n_points;
        let signed = if k < n / 2 { k as f64 } else { k as f64 - n as f64 };
        signed * self.dp()
    }

    pub fn p_points(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.p(k)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_geometry() {
        let g = GridSpec::default();
        g.check().unwrap();
        assert_eq!(g.dq(), 80.0 / 2048.0);
        assert!((g.p_max() - PI / g.dq()).abs() < 1e-12);
        assert_eq!(g.p(0), 0.0);
        assert_eq!(g.p(1024), -g.p_max());
        assert!((g.p(1023) - (g.p_max() - g.dp())).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_grids() {
        for g in [
            GridSpec { n_points: 1000, ..GridSpec::default() },
            GridSpec { n_points: 8, ..GridSpec::default() },
            GridSpec { q_max: -50.0, ..GridSpec::default() },
            GridSpec { dt: 0.0, ..GridSpec::default() },
            GridSpec { q_min: f64::NAN, ..GridSpec::default() },
        ] {
            assert!(g.check().is_err(), "{g:?}");
        }
    }
}
