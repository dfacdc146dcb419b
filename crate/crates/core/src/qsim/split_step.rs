use num_complex::Complex64;
use serde::Serialize;

use super::wavefunction::{Spectral, WaveFunction};
use crate::error::{Error, Result};
use crate::protocol::FrequencyProgram;

/// Edge cells monitored for aliasing.
pub const EDGE_CELLS: usize = 6;
pub const EDGE_PROBABILITY_LIMIT: f64 = 1e-10;

/// Packet probability too close to the periodic boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityWarning {
    pub time: f64,
    pub edge_probability: f64,
}

#[derive(Debug, Clone)]
pub struct Propagation {
    /// Snapshots at equal intervals, starting with the initial state.
    pub snapshots: Vec<WaveFunction>,
    pub warnings: Vec<StabilityWarning>,
}

/// Strang-split propagator for `i dPsi/ds = [P^2/2 + Omega^2(s) Q^2/2] Psi`.
///
/// Each step of length `h` applies a potential half-step, an exact kinetic
/// step in momentum space and another potential half-step, with `Omega^2`
/// taken at the midpoint of the step.
pub struct SplitStep<'a> {
    program: &'a FrequencyProgram,
    spectral: Spectral,
    q2: Vec<f64>,
    p2: Vec<f64>,
    kinetic: Vec<Complex64>,
    kinetic_h: f64,
}

impl<'a> SplitStep<'a> {
    pub fn new(program: &'a FrequencyProgram, grid: &super::GridSpec) -> Self {
        let n = grid.n_points;
        SplitStep {
            program,
            spectral: Spectral::new(n),
            q2: (0..n).map(|j| grid.q(j).powi(2)).collect(),
            p2: (0..n).map(|k| grid.p(k).powi(2)).collect(),
            kinetic: vec![Complex64::new(1.0, 0.0); n],
            kinetic_h: f64::NAN,
        }
    }

    fn set_step(&mut self, h: f64) {
        if h == self.kinetic_h {
            return;
        }
        let inv_n = 1.0 / self.p2.len() as f64;
        for (k, p2) in self.kinetic.iter_mut().zip(&self.p2) {
            *k = Complex64::from_polar(inv_n, -0.5 * p2 * h);
        }
        self.kinetic_h = h;
    }

    fn kick(&self, psi: &mut [Complex64], omega2: f64, tau: f64) {
        if omega2 == 0.0 {
            return;
        }
        let c = -0.5 * omega2 * tau;
        for (a, q2) in psi.iter_mut().zip(&self.q2) {
            *a *= Complex64::cis(c * q2);
        }
    }

    /// One step of length `h` from time `s`.
    pub fn step(&mut self, wf: &mut WaveFunction, h: f64) {
        self.set_step(h);
        let omega2 = self.program.omega2_s(wf.time + 0.5 * h);
        self.kick(&mut wf.amplitudes, omega2, 0.5 * h);
        self.spectral.forward.process(&mut wf.amplitudes);
        for (a, k) in wf.amplitudes.iter_mut().zip(&self.kinetic) {
            *a *= k;
        }
        self.spectral.inverse.process(&mut wf.amplitudes);
        self.kick(&mut wf.amplitudes, omega2, 0.5 * h);
        wf.time += h;
    }

    /// Advances to `s_end` in the smallest number of equal steps not longer than `dt_max`.
    pub fn advance(&mut self, wf: &mut WaveFunction, s_end: f64, dt_max: f64) {
        let span = s_end - wf.time;
        if span <= 0.0 {
            return;
        }
        let steps = (span / dt_max - 1e-9).ceil().max(1.0) as usize;
        let h = span / steps as f64;
        let start = wf.time;
        for i in 0..steps {
            self.step(wf, h);
            // keep the clock free of accumulated rounding
            wf.time = if i + 1 == steps { s_end } else { start + (i + 1) as f64 * h };
        }
    }
}

/// Propagates `wf` from its current time to `s = 1` and records `snapshots`
/// equal intervals (`snapshots + 1` states including the initial one).
pub fn propagate(wf: &WaveFunction, program: &FrequencyProgram, snapshots: usize) -> Result<Propagation> {
    wf.grid.check()?;
    if !(0.0..1.0).contains(&wf.time) {
        return Err(Error::TimeOutOfRange { t: wf.time, t_f: 1.0 });
    }
    let snapshots = snapshots.max(1);
    let mut stepper = SplitStep::new(program, &wf.grid);
    let mut current = wf.clone();
    let start = wf.time;
    let mut out = vec![current.clone()];
    let mut warnings = Vec::new();
    check_edges(&current, &mut warnings);
    for k in 1..=snapshots {
        let target = if k == snapshots { 1.0 } else { start + (1.0 - start) * k as f64 / snapshots as f64 };
        stepper.advance(&mut current, target, wf.grid.dt);
        check_edges(&current, &mut warnings);
        out.push(current.clone());
    }
    Ok(Propagation { snapshots: out, warnings })
}

fn check_edges(wf: &WaveFunction, warnings: &mut Vec<StabilityWarning>) {
    let p = wf.edge_probability(EDGE_CELLS);
    if p > EDGE_PROBABILITY_LIMIT {
        warnings.push(StabilityWarning { time: wf.time, edge_probability: p });
    }
}
