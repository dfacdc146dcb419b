use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlannerScalar};

use super::grid::GridSpec;
use crate::error::{Error, Result};
use crate::moments::MomentState;

/// Complex amplitudes `Psi(Q_j)` on a [`GridSpec`] at dimensionless time `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    pub amplitudes: Vec<Complex64>,
    pub time: f64,
    pub grid: GridSpec,
}

/// Forward and inverse transforms of one length, planned once. The scalar
/// planner is used because its twiddles show a smaller systematic norm drift
/// over long runs than the SIMD ones.
#[derive(Clone)]
pub(crate) struct Spectral {
    pub forward: Arc<dyn Fft<f64>>,
    pub inverse: Arc<dyn Fft<f64>>,
}

impl Spectral {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlannerScalar::new();
        Spectral { forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) }
    }
}

impl WaveFunction {
    pub fn new(grid: GridSpec, amplitudes: Vec<Complex64>, time: f64) -> Result<Self> {
        grid.check()?;
        if amplitudes.len() != grid.n_points {
            return Err(Error::InvalidGrid(format!(
                "{} amplitudes for a {}-point grid",
                amplitudes.len(),
                grid.n_points
            )));
        }
        Ok(WaveFunction { amplitudes, time, grid })
    }

    /// `sum |Psi|^2 dQ`.
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dq()
    }

    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Momentum amplitudes `<P_k|Psi>` in unshifted FFT order, normalized so that
    /// `sum |phi_k|^2 dP = sum |Psi_j|^2 dQ`.
    pub fn momentum_amplitudes(&self) -> Vec<Complex64> {
        let spectral = Spectral::new(self.grid.n_points);
        self.momentum_amplitudes_with(&spectral)
    }

    pub(crate) fn momentum_amplitudes_with(&self, spectral: &Spectral) -> Vec<Complex64> {
        let g = &self.grid;
        let mut buf = self.amplitudes.clone();
        spectral.forward.process(&mut buf);
        let c = g.dq() / (2.0 * PI).sqrt();
        for (k, b) in buf.iter_mut().enumerate() {
            *b *= Complex64::from_polar(c, -g.p(k) * g.q_min);
        }
        buf
    }

    /// Momentum density sampled at spacing `dP / pad`, from the transform of the
    /// wave function zero-extended to `pad` times the box length. Returns
    /// `(P, |phi(P)|^2)` sorted by `P`.
    pub fn momentum_density_padded(&self, pad: usize) -> (Vec<f64>, Vec<f64>) {
        let g = &self.grid;
        let pad = pad.max(1);
        let m = g.n_points * pad;
        let spectral = Spectral::new(m);
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        buf[..g.n_points].copy_from_slice(&self.amplitudes);
        spectral.forward.process(&mut buf);
        let dp = 2.0 * PI / (m as f64 * g.dq());
        let c = g.dq() * g.dq() / (2.0 * PI);
        let mut rows: Vec<(f64, f64)> = buf
            .iter()
            .enumerate()
            .map(|(k, b)| {
                let signed = if k < m / 2 { k as f64 } else { k as f64 - m as f64 };
                (signed * dp, b.norm_sqr() * c)
            })
            .collect();
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        rows.into_iter().unzip()
    }

    /// Apply the momentum operator `P = -i d/dQ` spectrally.
    pub(crate) fn apply_momentum(&self, spectral: &Spectral) -> Vec<Complex64> {
        let g = &self.grid;
        let n = g.n_points;
        let mut buf = self.amplitudes.clone();
        spectral.forward.process(&mut buf);
        for (k, b) in buf.iter_mut().enumerate() {
            *b *= g.p(k) / n as f64;
        }
        spectral.inverse.process(&mut buf);
        buf
    }

    /// Probability within `cells` grid points of either edge of the box.
    pub fn edge_probability(&self, cells: usize) -> f64 {
        let n = self.amplitudes.len();
        let cells = cells.min(n / 2);
        let edge: f64 = self.amplitudes[..cells]
            .iter()
            .chain(&self.amplitudes[n - cells..])
            .map(|a| a.norm_sqr())
            .sum();
        edge * self.grid.dq()
    }
}

/// Minimum-uncertainty Gaussian with the given means and position width
/// (`sigma_P = 1/(2 sigma_Q)` in code units), normalized on the grid.
///
/// Fails with [`Error::GridTooSmall`] unless six standard deviations fit in
/// both the position box and the momentum band.
pub fn gaussian_state(grid: &GridSpec, q0: f64, p0: f64, sigma_q: f64) -> Result<WaveFunction> {
    grid.check()?;
    if !(sigma_q.is_finite() && sigma_q > 0.0 && q0.is_finite() && p0.is_finite()) {
        return Err(Error::InvalidState(format!("bad Gaussian parameters q0={q0}, p0={p0}, sigma_q={sigma_q}")));
    }
    let sigma_p = 0.5 / sigma_q;
    if q0 - 6.0 * sigma_q < grid.q_min || q0 + 6.0 * sigma_q > grid.q_max {
        return Err(Error::GridTooSmall(format!(
            "packet [{}, {}] exceeds box [{}, {})",
            q0 - 6.0 * sigma_q,
            q0 + 6.0 * sigma_q,
            grid.q_min,
            grid.q_max
        )));
    }
    if p0.abs() + 6.0 * sigma_p > grid.p_max() {
        return Err(Error::GridTooSmall(format!(
            "momentum extent {} exceeds band limit {}",
            p0.abs() + 6.0 * sigma_p,
            grid.p_max()
        )));
    }
    let amp = (2.0 * PI * sigma_q * sigma_q).powf(-0.25);
    let amplitudes: Vec<Complex64> = (0..grid.n_points)
        .map(|j| {
            let q = grid.q(j);
            let x = q - q0;
            Complex64::from_polar(amp * (-x * x / (4.0 * sigma_q * sigma_q)).exp(), p0 * q)
        })
        .collect();
    let mut wf = WaveFunction { amplitudes, time: 0.0, grid: *grid };
    let scale = wf.norm().sqrt().recip();
    wf.amplitudes.iter_mut().for_each(|a| *a *= scale);
    Ok(wf)
}

/// Expectation values `<Q>, <P>, <Q^2>, <P^2>, <QP + PQ>`, in code units.
pub fn measure_moments(wf: &WaveFunction) -> MomentState {
    let spectral = Spectral::new(wf.grid.n_points);
    measure_moments_with(wf, &spectral)
}

pub(crate) fn measure_moments_with(wf: &WaveFunction, spectral: &Spectral) -> MomentState {
    let g = &wf.grid;
    let dq = g.dq();
    let norm = wf.norm();
    let (mut q1, mut q2) = (0.0, 0.0);
    for (j, a) in wf.amplitudes.iter().enumerate() {
        let q = g.q(j);
        let rho = a.norm_sqr();
        q1 += q * rho;
        q2 += q * q * rho;
    }
    let phi = wf.momentum_amplitudes_with(spectral);
    let (mut p0, mut p1, mut p2) = (0.0, 0.0, 0.0);
    for (k, a) in phi.iter().enumerate() {
        let p = g.p(k);
        let rho = a.norm_sqr();
        p0 += rho;
        p1 += p * rho;
        p2 += p * p * rho;
    }
    let p_psi = wf.apply_momentum(spectral);
    let qp: f64 = wf
        .amplitudes
        .iter()
        .zip(&p_psi)
        .enumerate()
        .map(|(j, (a, b))| g.q(j) * (a.conj() * b).re)
        .sum();
    MomentState {
        q_mean: q1 * dq / norm,
        q2: q2 * dq / norm,
        p_mean: p1 / p0,
        p2: p2 / p0,
        qp_sym: 2.0 * qp * dq / norm,
        time: wf.time,
    }
}
