use serde::{Deserialize, Serialize};

use super::{ScalingMode, ScalingSpec};
use crate::error::{Error, Result};
use crate::poly::Poly;

/// Polynomial reference trajectory `u(t) = P(t / t_f)`.
///
/// Coefficients are stored in the scaled time `s = t/t_f`; time derivatives
/// pick up a factor `1/t_f` per order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceTrajectory {
    spec: ScalingSpec,
    u: Poly,
    du: Poly,
    d2u: Poly,
    d3u: Poly,
}

impl ReferenceTrajectory {
    fn from_poly(spec: ScalingSpec, u: Poly) -> Self {
        let du = u.derivative();
        let d2u = du.derivative();
        let d3u = d2u.derivative();
        ReferenceTrajectory { spec, u, du, d2u, d3u }
    }

    pub fn spec(&self) -> &ScalingSpec {
        &self.spec
    }

    pub fn mode(&self) -> ScalingMode {
        self.spec.mode
    }

    pub fn t_f(&self) -> f64 {
        self.spec.t_f
    }

    pub fn mass(&self) -> f64 {
        self.spec.mass
    }

    /// Ascending coefficients of `u` in `s`.
    pub fn coeffs(&self) -> &[f64] {
        self.u.coeffs()
    }

    /// `u` as a polynomial in `s`.
    pub fn poly_s(&self) -> &Poly {
        &self.u
    }

    /// `k`-th derivative with respect to `s` (k <= 3), evaluated at `s`.
    pub fn ds(&self, k: usize, s: f64) -> f64 {
        match k {
            0 => self.u.eval(s),
            1 => self.du.eval(s),
            2 => self.d2u.eval(s),
            3 => self.d3u.eval(s),
            _ => self.u.nth_derivative(k).eval(s),
        }
    }

    /// `k`-th time derivative at physical time `t`.
    pub fn dt(&self, k: usize, t: f64) -> f64 {
        let t_f = self.spec.t_f;
        self.ds(k, t / t_f) / t_f.powi(k as i32)
    }

    pub fn u(&self, t: f64) -> f64 {
        self.dt(0, t)
    }

    pub fn udot(&self, t: f64) -> f64 {
        self.dt(1, t)
    }

    pub fn uddot(&self, t: f64) -> f64 {
        self.dt(2, t)
    }

    pub fn udddot(&self, t: f64) -> f64 {
        self.dt(3, t)
    }

    /// `u(0)`.
    pub fn u_initial(&self) -> f64 {
        self.u.eval(0.0)
    }

    /// `u(t_f)`.
    pub fn u_final(&self) -> f64 {
        self.u.eval(1.0)
    }

    pub fn udot_initial(&self) -> f64 {
        self.udot(0.0)
    }

    pub fn udot_final(&self) -> f64 {
        self.udot(self.spec.t_f)
    }

    /// Requested final-to-initial ratio of the scaled observable: `u0/uf` in
    /// momentum mode, `u'0/u'f` in position mode.
    pub fn scale_factor(&self) -> f64 {
        self.spec.scale_factor
    }

    /// `max |u''(t)|` estimated on a uniform grid, used to normalize residuals.
    pub(crate) fn max_abs_on_grid(&self, k: usize, n: usize) -> f64 {
        (0..=n)
            .map(|i| self.dt(k, self.spec.t_f * i as f64 / n as f64).abs())
            .fold(0.0, f64::max)
    }
}

/// Quintic `u(s) = u0 + (uf - u0) s^3 (10 - 15 s + 6 s^2)` with
/// `uf = u0 / scale_factor`; first and second derivatives vanish at both ends.
pub fn design_momentum_trajectory(spec: &ScalingSpec) -> Result<ReferenceTrajectory> {
    expect_mode(spec, ScalingMode::MomentumScaling)?;
    spec.check()?;
    let u0 = spec.u0;
    let uf = u0 / spec.scale_factor;
    if !uf.is_finite() {
        return Err(Error::InvalidSpec(format!("final amplitude u0/scale_factor = {uf} is not finite")));
    }
    let d = uf - u0;
    let coeffs = vec![u0, 0.0, 0.0, 10.0 * d, -15.0 * d, 6.0 * d];
    finite_trajectory(spec, Poly::new(coeffs))
}

/// Degree-7 polynomial with `u = u'' = u''' = 0` at both ends, `u'(0) = udot0`
/// and `u'(t_f) = udot0 / scale_factor`.
///
/// The vanishing third derivative makes `-u''/u -> 0` at the boundaries. With
/// `a = t_f udot0` and `b = t_f udotf` (slopes in `s`) the unique solution of
/// the eight boundary conditions is
/// `a s + (-20a - 15b) s^4 + (45a + 39b) s^5 + (-36a - 34b) s^6 + (10a + 10b) s^7`.
pub fn design_position_trajectory(spec: &ScalingSpec) -> Result<ReferenceTrajectory> {
    expect_mode(spec, ScalingMode::PositionScaling)?;
    spec.check()?;
    let a = spec.t_f * spec.udot0;
    let b = spec.t_f * spec.udot0 / spec.scale_factor;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidSpec("boundary slopes are not finite".into()));
    }
    let coeffs = vec![
        0.0,
        a,
        0.0,
        0.0,
        -20.0 * a - 15.0 * b,
        45.0 * a + 39.0 * b,
        -36.0 * a - 34.0 * b,
        10.0 * a + 10.0 * b,
    ];
    finite_trajectory(spec, Poly::new(coeffs))
}

/// Rejects amplitudes so large that the polynomial or its first three
/// derivatives overflow when evaluated.
fn finite_trajectory(spec: &ScalingSpec, poly: Poly) -> Result<ReferenceTrajectory> {
    if !(0..=3).all(|k| poly.nth_derivative(k).coeff_norm().is_finite()) {
        return Err(Error::InvalidSpec("reference trajectory overflows; rescale u0 or udot0".into()));
    }
    Ok(ReferenceTrajectory::from_poly(*spec, poly))
}

/// Dispatches on `spec.mode`.
pub fn design_trajectory(spec: &ScalingSpec) -> Result<ReferenceTrajectory> {
    match spec.mode {
        ScalingMode::MomentumScaling => design_momentum_trajectory(spec),
        ScalingMode::PositionScaling => design_position_trajectory(spec),
    }
}

fn expect_mode(spec: &ScalingSpec, mode: ScalingMode) -> Result<()> {
    if spec.mode != mode {
        return Err(Error::ModeMismatch {
            expected: mode.name(),
            got: spec.mode.name(),
        });
    }
    Ok(())
}
