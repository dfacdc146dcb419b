use std::path::PathBuf;

use hscaler::qsim::GridSpec;
use hscaler::{CodeUnits, MomentState, ScalingSpec};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub spec: ScalingSpec,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub initial_state: InitialState,
    #[serde(default)]
    pub ensemble: EnsembleConfig,
    #[serde(default)]
    pub outputs: OutputConfig,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
}

/// Initial state in physical units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    /// Minimum-uncertainty Gaussian.
    Gaussian { q_mean: f64, p_mean: f64, sigma_q: f64 },
    /// Raw moments `<q>, <p>, <q^2>, <p^2>, <qp+pq>`.
    Moments { q_mean: f64, p_mean: f64, q2: f64, p2: f64, qp_sym: f64 },
}

impl Default for InitialState {
    fn default() -> Self {
        InitialState::Gaussian { q_mean: 1.0, p_mean: 1.0, sigma_q: std::f64::consts::FRAC_1_SQRT_2 }
    }
}

impl InitialState {
    pub fn moments(&self, hbar: f64) -> MomentState {
        match *self {
            InitialState::Gaussian { q_mean, p_mean, sigma_q } => {
                let sigma_p = 0.5 * hbar / sigma_q;
                MomentState::gaussian(q_mean, p_mean, sigma_q * sigma_q, sigma_p * sigma_p, 0.0)
            }
            InitialState::Moments { q_mean, p_mean, q2, p2, qp_sym } => {
                MomentState { q_mean, p_mean, q2, p2, qp_sym, time: 0.0 }
            }
        }
    }

    /// `(Q0, P0, sigma_Q)` in code units; only Gaussians can seed a wave packet.
    pub fn code_gaussian(&self, units: &CodeUnits) -> Result<(f64, f64, f64), CliError> {
        match *self {
            InitialState::Gaussian { q_mean, p_mean, sigma_q } => {
                Ok((units.q_to_code(q_mean), units.p_to_code(p_mean), units.q_to_code(sigma_q)))
            }
            InitialState::Moments { .. } => {
                Err(CliError::Config("wave-packet commands need a gaussian initial_state".into()))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnsembleConfig {
    pub n: usize,
    pub seed: u64,
    /// Also integrate with velocity Verlet at this step and report the deviation.
    pub verlet_dt: Option<f64>,
    /// Write every point of every snapshot.
    pub write_points: bool,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig { n: 100_000, seed: 0, verlet_dt: None, write_points: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    /// Equal intervals between snapshots.
    pub snapshots: usize,
    /// Intervals of the protocol and moment tables.
    pub samples: usize,
    pub wigner: WignerOutput,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: None, snapshots: 12, samples: 200, wigner: WignerOutput::default() }
    }
}

/// Wigner export window and decimation, in code units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WignerOutput {
    pub q_window: Option<(f64, f64)>,
    pub p_window: Option<(f64, f64)>,
    pub pad: usize,
    pub q_stride: usize,
    pub p_stride: usize,
}

impl Default for WignerOutput {
    fn default() -> Self {
        WignerOutput { q_window: None, p_window: None, pad: 1, q_stride: 1, p_stride: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub t_f: Vec<f64>,
    pub scale_factors: Vec<f64>,
}

impl RunConfig {
    pub fn from_json_bytes(bytes: &[u8]) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_slice(bytes).map_err(|e| CliError::Config(format!("config: {e}")))?;
        cfg.check()?;
        Ok(cfg)
    }

    /// Re-checks every constraint the schema cannot express.
    pub fn check(&self) -> Result<(), CliError> {
        let cfg_err = |e: hscaler::Error| CliError::Config(e.to_string());
        self.spec.check().map_err(cfg_err)?;
        self.grid.check().map_err(cfg_err)?;
        let state = self.initial_state.moments(self.spec.hbar);
        if let InitialState::Gaussian { sigma_q, .. } = self.initial_state {
            if !(sigma_q.is_finite() && sigma_q > 0.0) {
                return Err(CliError::Config(format!("sigma_q must be positive, got {sigma_q}")));
            }
        }
        state.check().map_err(cfg_err)?;
        if self.ensemble.n == 0 {
            return Err(CliError::Config("ensemble.n must be positive".into()));
        }
        if let Some(dt) = self.ensemble.verlet_dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(CliError::Config(format!("ensemble.verlet_dt must be positive, got {dt}")));
            }
        }
        let o = &self.outputs;
        if o.snapshots == 0 || o.samples == 0 {
            return Err(CliError::Config("outputs.snapshots and outputs.samples must be positive".into()));
        }
        let w = &o.wigner;
        if w.pad == 0 || w.q_stride == 0 || w.p_stride == 0 {
            return Err(CliError::Config("outputs.wigner pad and strides must be positive".into()));
        }
        for (name, win) in [("q_window", w.q_window), ("p_window", w.p_window)] {
            if let Some((lo, hi)) = win {
                if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                    return Err(CliError::Config(format!("outputs.wigner.{name} must be an increasing pair")));
                }
            }
        }
        if let Some(sw) = &self.sweep {
            if !sw.t_f.is_empty() && !sw.scale_factors.is_empty() {
                return Err(CliError::Config("sweep takes t_f or scale_factors, not both".into()));
            }
            if sw.t_f.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
                return Err(CliError::Config("sweep.t_f values must be positive".into()));
            }
            if sw.scale_factors.iter().any(|f| !(f.is_finite() && *f != 0.0)) {
                return Err(CliError::Config("sweep.scale_factors must be finite and nonzero".into()));
            }
        }
        Ok(())
    }
}
