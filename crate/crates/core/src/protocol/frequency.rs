use serde::Serialize;

use super::trajectory::ReferenceTrajectory;
use crate::error::{Error, Result};
use crate::poly::Poly;

/// Relative tolerance used to decide that a polynomial vanishes at a root.
const ROOT_TOL: f64 = 1e-10;
/// Below this fraction of max|u| the ratio falls back to a derivative ratio.
const FALLBACK_THRESHOLD: f64 = 1e-8;
const PEAK_SAMPLES: usize = 4096;

/// The trap program `omega^2(t) = -u''(t)/u(t)`.
///
/// Internally stored as the deflated rational function
/// `Omega^2(s) = numer(s) / denom(s)` in the dimensionless time `s = t/t_f`,
/// with every shared root of `u` and `u''` on `[0, 1]` divided out, so that
/// `omega^2(t) = Omega^2(t/t_f) / t_f^2`.
#[derive(Debug, Clone)]
pub struct FrequencyProgram {
    traj: ReferenceTrajectory,
    numer: Poly,
    denom: Poly,
    /// Cancelled roots of `u` in `s` with their multiplicities.
    removed: Vec<(f64, usize)>,
    denom_scale: f64,
    peak_abs_omega2: f64,
    peak_s: f64,
}

/// One row of a protocol tabulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProgramSample {
    pub s: f64,
    pub t: f64,
    pub u: f64,
    pub udot: f64,
    pub omega2: f64,
}

/// Builds `omega^2 = -u''/u` with removable singularities cancelled exactly.
///
/// Every root of `u(s)` on `[0, 1]` must be a root of `u''(s)` of at least the
/// same multiplicity; otherwise the protocol has a genuine pole and is
/// rejected with [`Error::GenuineSingularity`].
pub fn synthesize_omega2(traj: &ReferenceTrajectory) -> Result<FrequencyProgram> {
    let mut denom = traj.poly_s().clone();
    let mut numer = traj.poly_s().nth_derivative(2).scale(-1.0);
    let mut removed = Vec::new();

    if denom.is_zero() {
        return Err(Error::InvalidSpec("reference trajectory is identically zero".into()));
    }

    for (root, mult) in traj.poly_s().real_roots(0.0, 1.0, ROOT_TOL) {
        if numer.is_zero() {
            removed.push((root, mult));
            continue;
        }
        let order = numer.vanishing_order(root, ROOT_TOL);
        if order < mult {
            return Err(Error::GenuineSingularity { s: root });
        }
        for _ in 0..mult {
            denom = denom.deflate(root).0;
            numer = numer.deflate(root).0;
        }
        removed.push((root, mult));
    }

    let denom_scale = (0..=256)
        .map(|i| traj.poly_s().eval(i as f64 / 256.0).abs())
        .fold(0.0, f64::max);

    let mut program = FrequencyProgram {
        traj: traj.clone(),
        numer,
        denom,
        removed,
        denom_scale,
        peak_abs_omega2: 0.0,
        peak_s: 0.0,
    };
    let (s, peak) = program.search_peak();
    program.peak_s = s;
    program.peak_abs_omega2 = peak / (traj.t_f() * traj.t_f());
    Ok(program)
}

impl FrequencyProgram {
    pub fn trajectory(&self) -> &ReferenceTrajectory {
        &self.traj
    }

    pub fn t_f(&self) -> f64 {
        self.traj.t_f()
    }

    /// Roots of `u` on `[0, 1]` (in `s`) that were cancelled against `u''`.
    pub fn removed_roots(&self) -> &[(f64, usize)] {
        &self.removed
    }

    /// Dimensionless `Omega^2(s) = t_f^2 omega^2(s t_f)`; zero outside `[0, 1]`.
    pub fn omega2_s(&self, s: f64) -> f64 {
        if !(0.0..=1.0).contains(&s) {
            return 0.0;
        }
        if self.numer.is_zero() {
            return 0.0;
        }
        let d = self.denom.eval(s);
        if d.abs() < FALLBACK_THRESHOLD * self.denom_scale {
            // only reachable for trajectories whose roots escaped deflation
            let dd = self.denom.derivative().eval(s);
            if dd != 0.0 {
                return self.numer.derivative().eval(s) / dd;
            }
        }
        self.numer.eval(s) / d
    }

    /// `omega^2(t)` in physical units.
    pub fn omega2(&self, t: f64) -> f64 {
        let t_f = self.t_f();
        self.omega2_s(t / t_f) / (t_f * t_f)
    }

    /// `max_t |omega^2(t)|`.
    pub fn peak_abs_omega2(&self) -> f64 {
        self.peak_abs_omega2
    }

    /// Time at which the peak of `|omega^2|` is attained.
    pub fn peak_time(&self) -> f64 {
        self.peak_s * self.t_f()
    }

    /// Uniform tabulation with `n` intervals (`n + 1` rows).
    pub fn tabulate(&self, n: usize) -> Vec<ProgramSample> {
        let n = n.max(1);
        let t_f = self.t_f();
        (0..=n)
            .map(|i| {
                let s = i as f64 / n as f64;
                let t = s * t_f;
                ProgramSample {
                    s,
                    t,
                    u: self.traj.u(t),
                    udot: self.traj.udot(t),
                    omega2: self.omega2(t),
                }
            })
            .collect()
    }

    /// Dense sampling followed by golden-section refinement of the three best
    /// local maxima of `|Omega^2(s)|`.
    fn search_peak(&self) -> (f64, f64) {
        let f = |s: f64| self.omega2_s(s).abs();
        let n = PEAK_SAMPLES;
        let vals: Vec<f64> = (0..=n).map(|i| f(i as f64 / n as f64)).collect();

        let mut local: Vec<usize> = (0..=n)
            .filter(|&i| {
                let left = if i == 0 { f64::NEG_INFINITY } else { vals[i - 1] };
                let right = if i == n { f64::NEG_INFINITY } else { vals[i + 1] };
                vals[i] >= left && vals[i] >= right
            })
            .collect();
        local.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
        local.truncate(3);

        let (mut best_s, mut best) = (0.0, vals[0]);
        for i in local {
            let lo = i.saturating_sub(1) as f64 / n as f64;
            let hi = (i + 1).min(n) as f64 / n as f64;
            let (s, v) = golden_max(&f, lo, hi, 1e-10);
            let (s, v) = if vals[i] > v { (i as f64 / n as f64, vals[i]) } else { (s, v) };
            if v > best {
                best = v;
                best_s = s;
            }
        }
        (best_s, best)
    }
}

fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, rel_tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= rel_tol * (a.abs() + b.abs()).max(1e-300) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
