//! Adaptive Dormand-Prince 5(4) integrator for small fixed-size systems.
//!
//! Steps are clipped so that every requested output time is hit exactly;
//! no interpolation error enters the tabulated values.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rtol: 1e-12, atol: 1e-14 }
    }
}

const MAX_STEPS: usize = 2_000_000;

// Dormand & Prince (1980) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
// B - B*, the embedded fourth-order weights subtracted from the fifth-order ones.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `y' = f(t, y)` from `(t0, y0)` and returns the state at each of
/// `outputs`, which must be sorted and not precede `t0`.
pub fn integrate<const N: usize, F>(
    f: F,
    t0: f64,
    y0: [f64; N],
    outputs: &[f64],
    tol: Tolerance,
) -> Result<Vec<[f64; N]>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    if outputs.windows(2).any(|w| w[1] < w[0]) || outputs.first().is_some_and(|&t| t < t0) {
        return Err(Error::IntegratorFailure {
            t: t0,
            reason: "output times must be sorted and not precede the start time".into(),
        });
    }
    let Some(&t_end) = outputs.last() else {
        return Ok(vec![]);
    };

    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = initial_step(&f, t, &y, &k1, tol, t_end - t0);
    let mut out = Vec::with_capacity(outputs.len());
    let mut next = 0;
    let mut steps = 0;

    while next < outputs.len() {
        if outputs[next] <= t {
            out.push(y);
            next += 1;
            continue;
        }
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::IntegratorFailure { t, reason: "step budget exhausted".into() });
        }
        let target = outputs[next];
        let clipped = t + h >= target;
        let step = if clipped { target - t } else { h };

        let (y_new, k_last, err) = dp_step(&f, t, &y, &k1, step, tol);
        if !err.is_finite() {
            return Err(Error::IntegratorFailure { t, reason: "non-finite state".into() });
        }
        if err <= 1.0 {
            t = if clipped { target } else { t + step };
            y = y_new;
            k1 = k_last;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        let proposed = step * factor;
        // a clipped accepted step says nothing about how large h could be
        h = if clipped && err <= 1.0 { h.max(proposed) } else { proposed };
        if h.abs() < 1e-14 * (1.0 + t.abs()) {
            return Err(Error::IntegratorFailure { t, reason: "step size underflow".into() });
        }
    }
    Ok(out)
}

fn dp_step<const N: usize, F>(
    f: &F,
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
    tol: Tolerance,
) -> ([f64; N], [f64; N], f64)
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut k = [[0.0; N]; 7];
    k[0] = *k1;
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                for i in 0..N {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        k[s] = f(t + C[s] * h, &ys);
    }
    // stage 7 is evaluated at the fifth-order solution (FSAL)
    let mut y_new = *y;
    let mut err2 = 0.0;
    for i in 0..N {
        let mut incr = 0.0;
        let mut e = 0.0;
        for s in 0..7 {
            incr += B[s] * k[s][i];
            e += E[s] * k[s][i];
        }
        y_new[i] += h * incr;
        let sc = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
        err2 += (h * e / sc).powi(2);
    }
    let err = (err2 / N as f64).sqrt();
    (y_new, k[6], err)
}

fn initial_step<const N: usize, F>(f: &F, t: f64, y: &[f64; N], k1: &[f64; N], tol: Tolerance, span: f64) -> f64
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let norm = |v: &[f64; N]| {
        (v.iter()
            .zip(y)
            .map(|(vi, yi)| (vi / (tol.atol + tol.rtol * yi.abs())).powi(2))
            .sum::<f64>()
            / N as f64)
            .sqrt()
    };
    let d0 = norm(y);
    let d1 = norm(k1);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span.abs().max(1e-300));
    let mut y1 = *y;
    for i in 0..N {
        y1[i] += h0 * k1[i];
    }
    let k2 = f(t + h0, &y1);
    let mut diff = [0.0; N];
    for i in 0..N {
        diff[i] = k2[i] - k1[i];
    }
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span.abs().max(1e-300))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_matches_closed_form() {
        let w = 3.0;
        let times: Vec<f64> = (0..=20).map(|i| i as f64 * 0.25).collect();
        let sol = integrate(|_, y: &[f64; 2]| [y[1], -w * w * y[0]], 0.0, [1.0, 0.0], &times, Tolerance::default())
            .unwrap();
        for (t, y) in times.iter().zip(&sol) {
            assert!((y[0] - (w * t).cos()).abs() < 1e-10, "t={t}");
            assert!((y[1] + w * (w * t).sin()).abs() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn exponential_growth_relative_accuracy() {
        let sol = integrate(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], &[10.0], Tolerance::default()).unwrap();
        assert!((sol[0][0] / 10f64.exp() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn repeated_and_initial_outputs() {
        let sol = integrate(|_, _: &[f64; 1]| [1.0], 0.0, [0.0], &[0.0, 0.5, 0.5, 1.0], Tolerance::default()).unwrap();
        assert_eq!(sol.len(), 4);
        assert_eq!(sol[0][0], 0.0);
        assert!((sol[1][0] - 0.5).abs() < 1e-15);
        assert_eq!(sol[1], sol[2]);
        assert!((sol[3][0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unsorted_outputs_rejected() {
        let r = integrate(|_, _: &[f64; 1]| [1.0], 0.0, [0.0], &[1.0, 0.5], Tolerance::default());
        assert!(matches!(r, Err(Error::IntegratorFailure { .. })));
    }
}
