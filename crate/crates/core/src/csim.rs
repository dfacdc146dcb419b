//! Classical ensembles sampled from a Gaussian Wigner distribution.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::moments::{fundamental_matrix, MomentState};
use crate::protocol::FrequencyProgram;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhasePoint {
    pub q: f64,
    pub p: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ensemble {
    pub points: Vec<PhasePoint>,
    pub time: f64,
    pub rng_seed: u64,
}

/// Weighted sample moments and their standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleMoments {
    pub state: MomentState,
    /// Standard errors of `q_mean, p_mean, q2, p2, qp_sym`, in that order.
    pub stderr: [f64; 5],
}

/// Draws `n` points from the Gaussian with the given moments. Point `i` uses
/// its own ChaCha stream, so the result does not depend on thread count.
pub fn sample_gaussian(moments: &MomentState, n: usize, seed: u64, hbar: f64) -> Result<Ensemble> {
    if n == 0 {
        return Err(Error::InvalidState("ensemble needs at least one point".into()));
    }
    moments.check_quantum_admissible(hbar).map_err(|e| Error::BadCovariance(e.to_string()))?;
    let (vq, vp, c) = (moments.var_q(), moments.var_p(), moments.cov_qp());
    let l11 = vq.sqrt();
    let l21 = c / l11;
    let l22 = (vp - l21 * l21).max(0.0).sqrt();
    let weight = 1.0 / n as f64;
    let points = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let z1: f64 = rng.sample(StandardNormal);
            let z2: f64 = rng.sample(StandardNormal);
            PhasePoint { q: moments.q_mean + l11 * z1, p: moments.p_mean + l21 * z1 + l22 * z2, weight }
        })
        .collect();
    Ok(Ensemble { points, time: moments.time, rng_seed: seed })
}

/// Maps every point by the fundamental matrix from `0` to `t`. The ensemble
/// must be at time zero.
pub fn propagate_exact(ensemble: &Ensemble, program: &FrequencyProgram, t: f64) -> Result<Ensemble> {
    check_start(ensemble)?;
    let m = fundamental_matrix(program, t)?;
    let points = ensemble
        .points
        .par_iter()
        .map(|pt| {
            let (q, p) = m.apply(pt.q, pt.p);
            PhasePoint { q, p, weight: pt.weight }
        })
        .collect();
    Ok(Ensemble { points, time: t, rng_seed: ensemble.rng_seed })
}

/// Velocity-Verlet integration from `0` to `t` in equal steps no longer than `dt`.
pub fn propagate_verlet(ensemble: &Ensemble, program: &FrequencyProgram, t: f64, dt: f64) -> Result<Ensemble> {
    check_start(ensemble)?;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidState(format!("time step must be positive, got {dt}")));
    }
    let t_f = program.t_f();
    if !(0.0..=t_f).contains(&t) {
        return Err(Error::TimeOutOfRange { t, t_f });
    }
    let steps = (t / dt - 1e-9).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let mass = program.trajectory().mass();
    let omega2: Vec<f64> = (0..=steps).map(|k| program.omega2(k as f64 * h)).collect();
    let points = ensemble
        .points
        .par_iter()
        .map(|pt| {
            let (mut q, mut p) = (pt.q, pt.p);
            for k in 0..steps {
                let half = p - 0.5 * h * mass * omega2[k] * q;
                q += h * half / mass;
                p = half - 0.5 * h * mass * omega2[k + 1] * q;
            }
            PhasePoint { q, p, weight: pt.weight }
        })
        .collect();
    Ok(Ensemble { points, time: t, rng_seed: ensemble.rng_seed })
}

fn check_start(ensemble: &Ensemble) -> Result<()> {
    if ensemble.time != 0.0 {
        return Err(Error::InvalidState(format!("ensemble must start at t = 0, got {}", ensemble.time)));
    }
    Ok(())
}

impl Ensemble {
    /// Weighted moments, summed in point order.
    pub fn moments(&self) -> EnsembleMoments {
        let total: f64 = self.points.iter().map(|x| x.weight).sum();
        let w2: f64 = self.points.iter().map(|x| x.weight * x.weight).sum::<f64>() / (total * total);
        let mean = |f: &dyn Fn(&PhasePoint) -> f64| self.points.iter().map(|x| x.weight * f(x)).sum::<f64>() / total;
        let fs: [&dyn Fn(&PhasePoint) -> f64; 5] =
            [&|x| x.q, &|x| x.p, &|x| x.q * x.q, &|x| x.p * x.p, &|x| 2.0 * x.q * x.p];
        let mut values = [0.0; 5];
        let mut stderr = [0.0; 5];
        for (i, f) in fs.iter().enumerate() {
            let mu = mean(f);
            let var = mean(&|x| (f(x) - mu).powi(2));
            values[i] = mu;
            // w2 = 1/n for equal weights
            stderr[i] = (var * w2).sqrt();
        }
        EnsembleMoments {
            state: MomentState {
                q_mean: values[0],
                p_mean: values[1],
                q2: values[2],
                p2: values[3],
                qp_sym: values[4],
                time: self.time,
            },
            stderr,
        }
    }

    pub fn total_weight(&self) -> f64 {
        self.points.iter().map(|x| x.weight).sum()
    }
}
