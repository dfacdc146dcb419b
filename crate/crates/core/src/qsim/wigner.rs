use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::wavefunction::{Spectral, WaveFunction};

/// Which part of phase space to tabulate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WignerOptions {
    /// Keep rows with `Q` in this closed interval (all rows if `None`).
    pub q_window: Option<(f64, f64)>,
    /// Keep columns with `P` in this closed interval (all columns if `None`).
    pub p_window: Option<(f64, f64)>,
    /// Zero-padding factor of the displacement transform; refines the `P` spacing.
    pub pad: usize,
}

impl Default for WignerOptions {
    fn default() -> Self {
        WignerOptions { q_window: None, p_window: None, pad: 1 }
    }
}

/// `W(Q_i, P_k)` stored row-major over `Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub w: Vec<f64>,
    pub dq: f64,
    pub dp: f64,
    pub time: f64,
}

impl WignerGrid {
    pub fn at(&self, i: usize, k: usize) -> f64 {
        self.w[i * self.p.len() + k]
    }

    /// `int W dP` for each `Q` row.
    pub fn q_marginal(&self) -> Vec<f64> {
        self.w.chunks(self.p.len()).map(|row| row.iter().sum::<f64>() * self.dp).collect()
    }

    /// `int W dQ` for each `P` column.
    pub fn p_marginal(&self) -> Vec<f64> {
        let np = self.p.len();
        let mut out = vec![0.0; np];
        for row in self.w.chunks(np) {
            for (o, v) in out.iter_mut().zip(row) {
                *o += v;
            }
        }
        out.iter_mut().for_each(|o| *o *= self.dq);
        out
    }

    pub fn total(&self) -> f64 {
        self.w.iter().sum::<f64>() * self.dq * self.dp
    }

    /// Area of `{W >= level}`. Cells whose corners straddle the level are
    /// subdivided and the bilinear interpolant is sampled at the sub-cell centres.
    pub fn level_set_area(&self, level: f64) -> f64 {
        const SUB: usize = 16;
        let (nq, np) = (self.q.len(), self.p.len());
        if nq < 2 || np < 2 {
            return 0.0;
        }
        let mut cells = 0.0;
        for i in 0..nq - 1 {
            for k in 0..np - 1 {
                let c = [self.at(i, k), self.at(i + 1, k), self.at(i, k + 1), self.at(i + 1, k + 1)];
                let above = c.iter().filter(|&&v| v >= level).count();
                if above == 4 {
                    cells += 1.0;
                } else if above > 0 {
                    let mut hits = 0usize;
                    for a in 0..SUB {
                        let x = (a as f64 + 0.5) / SUB as f64;
                        for b in 0..SUB {
                            let y = (b as f64 + 0.5) / SUB as f64;
                            let v = c[0] * (1.0 - x) * (1.0 - y) + c[1] * x * (1.0 - y) + c[2] * (1.0 - x) * y + c[3] * x * y;
                            if v >= level {
                                hits += 1;
                            }
                        }
                    }
                    cells += hits as f64 / (SUB * SUB) as f64;
                }
            }
        }
        cells * self.dq * self.dp
    }
}

/// Wigner function `W(Q, P) = (1/pi) int dy Psi*(Q+y) Psi(Q-y) exp(2iPy)`.
///
/// `Psi` is interpolated spectrally onto a grid of spacing `dQ/2`, so the
/// displacement `y` runs in steps of `dQ/2` and the `P` axis spans
/// `[-pi/dQ, pi/dQ)` with spacing `dP/(2 pad)`. Outside the box `Psi` is
/// taken to vanish. Rows are evaluated on the original `Q` grid.
pub fn wigner(wf: &WaveFunction, opts: &WignerOptions) -> WignerGrid {
    let g = wf.grid;
    let n = g.n_points;
    let fine = upsample2(wf);
    let pad = opts.pad.max(1);
    let m = 2 * n * pad;
    let dpw = 2.0 * PI / (m as f64 * g.dq());

    let p_all: Vec<f64> = (0..m).map(|k| (k as f64 - (m / 2) as f64) * dpw).collect();
    let (k_lo, k_hi) = window_indices(&p_all, opts.p_window);
    let q_all = g.q_points();
    let (i_lo, i_hi) = window_indices(&q_all, opts.q_window);

    let spectral = Spectral::new(m);
    let half_dq = 0.5 * g.dq();
    let rows: Vec<Vec<f64>> = (i_lo..i_hi)
        .into_par_iter()
        .map(|i| {
            let centre = 2 * i as isize;
            let mut buf = vec![Complex64::new(0.0, 0.0); m];
            for j in -(n as isize)..(n as isize) {
                let (a, b) = (centre + j, centre - j);
                if a < 0 || b < 0 || a >= 2 * n as isize || b >= 2 * n as isize {
                    continue;
                }
                let v = fine[a as usize].conj() * fine[b as usize];
                buf[j.rem_euclid(m as isize) as usize] = v;
            }
            spectral.inverse.process(&mut buf);
            (k_lo..k_hi)
                // output bin for P index k is (k - m/2) mod m
                .map(|k| buf[(k + m / 2) % m].re * half_dq / PI)
                .collect()
        })
        .collect();

    WignerGrid {
        q: q_all[i_lo..i_hi].to_vec(),
        p: p_all[k_lo..k_hi].to_vec(),
        w: rows.concat(),
        dq: g.dq(),
        dp: dpw,
        time: wf.time,
    }
}

fn window_indices(axis: &[f64], window: Option<(f64, f64)>) -> (usize, usize) {
    match window {
        None => (0, axis.len()),
        Some((lo, hi)) => {
            let start = axis.partition_point(|&x| x < lo);
            let end = axis.partition_point(|&x| x <= hi);
            (start, end.max(start))
        }
    }
}

/// Band-limited interpolation onto the grid `Q_min + j dQ/2`, `j < 2N`.
fn upsample2(wf: &WaveFunction) -> Vec<Complex64> {
    let n = wf.grid.n_points;
    let coarse = Spectral::new(n);
    let mut spec = wf.amplitudes.clone();
    coarse.forward.process(&mut spec);
    let mut wide = vec![Complex64::new(0.0, 0.0); 2 * n];
    let h = n / 2;
    wide[..h].copy_from_slice(&spec[..h]);
    wide[2 * n - h..].copy_from_slice(&spec[h..]);
    // split the Nyquist bin evenly between +N/2 and -N/2
    let nyq = spec[h];
    wide[h] = nyq * 0.5;
    wide[2 * n - h] = nyq * 0.5;
    Spectral::new(2 * n).inverse.process(&mut wide);
    let scale = 1.0 / n as f64;
    wide.iter_mut().for_each(|v| *v *= scale);
    wide
}
