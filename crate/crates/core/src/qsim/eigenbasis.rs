use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::wavefunction::WaveFunction;
use crate::error::{Error, Result};
use crate::moments::continued_momentum_integral;
use crate::protocol::{FrequencyProgram, ScalingMode};

/// `|U(s)|` below which the eigenfunctions are not evaluated.
pub const MIRROR_NODE_THRESHOLD: f64 = 1e-8;

/// Code-unit quantities the eigenfunctions depend on at time `s`:
/// `U = u/u0`, `U' = dU/ds` and `I_s = int_0^s U^-2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenData {
    pub s: f64,
    pub u_ratio: f64,
    pub u_ratio_ds: f64,
    pub i_s: f64,
}

/// Evaluates [`EigenData`] for a momentum-mode program.
///
/// Before the first node of `u` the integral comes from quadrature. Past a
/// node it is continued through `U I = m M12` from the fundamental matrix.
pub fn eigen_data(program: &FrequencyProgram, s: f64) -> Result<EigenData> {
    let traj = program.trajectory();
    if traj.mode() != ScalingMode::MomentumScaling {
        return Err(Error::ModeMismatch { expected: ScalingMode::MomentumScaling.name(), got: traj.mode().name() });
    }
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::TimeOutOfRange { t: s, t_f: 1.0 });
    }
    let t_f = traj.t_f();
    let t = s * t_f;
    let u_ratio = traj.u(t) / traj.u_initial();
    if u_ratio.abs() < MIRROR_NODE_THRESHOLD {
        return Err(Error::MirrorNode { t, u_abs: traj.u(t).abs() });
    }
    let u_ratio_ds = traj.udot(t) * t_f / traj.u_initial();
    let i_t = continued_momentum_integral(program, t)?;
    Ok(EigenData { s, u_ratio, u_ratio_ds, i_s: i_t / t_f })
}

/// `U^{-1/2}`, continued past a node with the `-pi/2` phase of a focus.
fn amplitude(u_ratio: f64) -> Complex64 {
    if u_ratio > 0.0 {
        Complex64::new(u_ratio.sqrt().recip(), 0.0)
    } else {
        Complex64::new(0.0, -(-u_ratio).sqrt().recip())
    }
}

/// Invariant eigenfunction `phi_{P0}(Q, s)` on the points `q` (code units).
///
/// Delta-normalized: `phi_{P0}(Q, 0) = exp(i P0 Q) / sqrt(2 pi)`.
pub fn invariant_eigenfunction(program: &FrequencyProgram, p0: f64, q: &[f64], s: f64) -> Result<Vec<Complex64>> {
    let d = eigen_data(program, s)?;
    Ok(eigenfunction_from(&d, p0, q))
}

pub(crate) fn eigenfunction_from(d: &EigenData, p0: f64, q: &[f64]) -> Vec<Complex64> {
    let pref = amplitude(d.u_ratio) * Complex64::cis(-0.5 * p0 * p0 * d.i_s) / (2.0 * PI).sqrt();
    q.iter()
        .map(|&x| pref * Complex64::cis((p0 * x + 0.5 * d.u_ratio_ds * x * x) / d.u_ratio))
        .collect()
}

/// Wave function at time `s` from the expansion of `initial` in the
/// eigenbasis, by quadrature over the conjugate momentum grid.
///
/// The momentum sum is the free evolution of `initial` over a time `I_s`,
/// evaluated at `Q/U`. Arguments outside the box give zero, so the periodic
/// images of the quadrature never enter.
pub fn reconstruct_via_expansion(initial: &WaveFunction, program: &FrequencyProgram, s: f64) -> Result<WaveFunction> {
    if initial.time != 0.0 {
        return Err(Error::InvalidState(format!("expansion needs the state at s = 0, got s = {}", initial.time)));
    }
    let d = eigen_data(program, s)?;
    let grid = initial.grid;
    let dp = grid.dp();
    let phi0 = initial.momentum_amplitudes();
    let ps = grid.p_points();
    // c_k = dP <P_k|psi0> exp(-i P_k^2 I / 2)
    let coeffs: Vec<Complex64> = phi0
        .iter()
        .zip(&ps)
        .map(|(a, &p)| a * Complex64::cis(-0.5 * p * p * d.i_s) * dp)
        .collect();
    let pref = amplitude(d.u_ratio) / (2.0 * PI).sqrt();
    let amplitudes: Vec<Complex64> = grid
        .q_points()
        .into_par_iter()
        .map(|x| {
            let y = x / d.u_ratio;
            if y < grid.q_min || y >= grid.q_max {
                return Complex64::new(0.0, 0.0);
            }
            let sum: Complex64 = coeffs.iter().zip(&ps).map(|(c, &p)| c * Complex64::cis(p * y)).sum();
            pref * Complex64::cis(0.5 * d.u_ratio_ds * x * x / d.u_ratio) * sum
        })
        .collect();
    WaveFunction::new(grid, amplitudes, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{design_trajectory, synthesize_omega2, ScalingSpec};
    use crate::qsim::{gaussian_state, GridSpec};

    fn program(spec: ScalingSpec) -> FrequencyProgram {
        synthesize_omega2(&design_trajectory(&spec).unwrap()).unwrap()
    }

    #[test]
    fn plane_wave_at_start() {
        let p = program(ScalingSpec::momentum(0.2, 1.0));
        let q: Vec<f64> = (0..50).map(|i| -5.0 + 0.2 * i as f64).collect();
        let phi = invariant_eigenfunction(&p, 1.7, &q, 0.0).unwrap();
        for (x, v) in q.iter().zip(&phi) {
            let expected = Complex64::cis(1.7 * x) / (2.0 * PI).sqrt();
            assert!((v - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn plane_wave_of_scaled_momentum_at_end() {
        let p = program(ScalingSpec::momentum(0.2, 1.0));
        let q: Vec<f64> = (0..50).map(|i| -5.0 + 0.2 * i as f64).collect();
        let p0 = 1.3;
        let phi = invariant_eigenfunction(&p, p0, &q, 1.0).unwrap();
        // ratio to a plane wave of momentum p0/5 must be constant
        let r0 = phi[0] / Complex64::cis(p0 / 5.0 * q[0]);
        for (x, v) in q.iter().zip(&phi) {
            assert!((v / Complex64::cis(p0 / 5.0 * x) - r0).norm() < 1e-12);
        }
        assert!((r0.norm() - (0.2f64).sqrt() / (2.0 * PI).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn mirror_node_is_rejected() {
        let p = program(ScalingSpec::momentum(-1.0, 1.0));
        assert!(matches!(invariant_eigenfunction(&p, 1.0, &[0.0], 0.5), Err(Error::MirrorNode { .. })));
        let pos = program(ScalingSpec::position(-0.5, 1.0));
        assert!(matches!(invariant_eigenfunction(&pos, 1.0, &[0.0], 0.5), Err(Error::ModeMismatch { .. })));
    }

    fn tdse_residual(p: &FrequencyProgram, p0: f64, s: f64, h: f64) -> f64 {
        let q: Vec<f64> = (0..201).map(|i| -10.0 + 0.1 * i as f64).collect();
        let plus = invariant_eigenfunction(p, p0, &q, s + h).unwrap();
        let minus = invariant_eigenfunction(p, p0, &q, s - h).unwrap();
        let d = eigen_data(p, s).unwrap();
        let phi = eigenfunction_from(&d, p0, &q);
        let w2 = p.omega2_s(s);
        let (mut num, mut den) = (0.0, 0.0);
        for (j, &x) in q.iter().enumerate() {
            let theta_q = (p0 + d.u_ratio_ds * x) / d.u_ratio;
            let theta_qq = d.u_ratio_ds / d.u_ratio;
            let d2 = (Complex64::i() * theta_qq - theta_q * theta_q) * phi[j];
            let h_phi = -0.5 * d2 + 0.5 * w2 * x * x * phi[j];
            let dt_phi = (plus[j] - minus[j]) / (2.0 * h);
            num += (Complex64::i() * dt_phi - h_phi).norm_sqr();
            den += h_phi.norm_sqr();
        }
        (num / den).sqrt()
    }

    #[test]
    fn eigenfunction_solves_schrodinger_equation() {
        for spec in [ScalingSpec::momentum(0.2, 1.0), ScalingSpec::momentum(5.0, 1.0), ScalingSpec::momentum(-1.0, 1.0)] {
            let p = program(spec);
            for s in [0.2, 0.37, 0.8] {
                let r1 = tdse_residual(&p, 1.1, s, 1e-4);
                let r2 = tdse_residual(&p, 1.1, s, 5e-5);
                let r3 = tdse_residual(&p, 1.1, s, 1e-5);
                // close to the mirror node the phase curvature grows like 1/U and the
                // difference quotient needs a smaller step than elsewhere
                if spec.scale_factor > 0.0 {
                    assert!(r3 <= 1e-4, "{spec:?} s={s}: {r3:e}");
                }
                let ratio = r1 / r2;
                assert!((ratio - 4.0).abs() < 0.2, "{spec:?} s={s}: ratio {ratio}");
            }
        }
    }

    #[test]
    fn expansion_is_identity_at_start() {
        let grid = GridSpec::default();
        let p = program(ScalingSpec::momentum(0.2, 1.0));
        let wf = gaussian_state(&grid, 1.0, 1.0, std::f64::consts::FRAC_1_SQRT_2).unwrap();
        let r = reconstruct_via_expansion(&wf, &p, 0.0).unwrap();
        let err: f64 = r.amplitudes.iter().zip(&wf.amplitudes).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err:e}");
    }

    #[test]
    fn expansion_preserves_norm() {
        let grid = GridSpec::default();
        let wf = gaussian_state(&grid, 1.0, 1.0, std::f64::consts::FRAC_1_SQRT_2).unwrap();
        for f in [0.2, 2.0] {
            let p = program(ScalingSpec::momentum(f, 1.0));
            for s in [0.5, 1.0] {
                let r = reconstruct_via_expansion(&wf, &p, s).unwrap();
                assert!((r.norm() - 1.0).abs() < 1e-10, "{f} {s}: {}", r.norm());
            }
        }
    }
}
