//! Dense real polynomials in ascending-degree form.
//!
//! Only what the protocol designer needs: Horner evaluation, exact
//! differentiation, synthetic division by a linear factor and isolation of
//! real roots on a closed interval.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    /// Builds a polynomial from ascending coefficients `c[0] + c[1] x + ...`.
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn constant(c: f64) -> Self {
        Poly::new(vec![c])
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(&c) if c == 0.0) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn nth_derivative(&self, n: usize) -> Poly {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    /// Sum of absolute coefficients; bounds |p(x)| on [-1, 1].
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    pub fn scale(&self, factor: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// Synthetic division by `(x - root)`; returns `(quotient, remainder)`.
    pub fn deflate(&self, root: f64) -> (Poly, f64) {
        let n = self.coeffs.len();
        if n == 0 {
            return (Poly::zero(), 0.0);
        }
        let mut q = vec![0.0; n - 1];
        let mut carry = 0.0;
        for k in (0..n).rev() {
            let b = self.coeffs[k] + root * carry;
            if k == 0 {
                return (Poly::new(q), b);
            }
            q[k - 1] = b;
            carry = b;
        }
        unreachable!()
    }

    /// Order to which `self` vanishes at `x`, judged against `rel_tol` times the
    /// coefficient norm of each successive derivative.
    pub fn vanishing_order(&self, x: f64, rel_tol: f64) -> usize {
        let Some(degree) = self.degree() else {
            return usize::MAX;
        };
        let mut order = 0;
        let mut p = self.clone();
        while !p.is_zero() && order <= degree {
            let tol = rel_tol * p.coeff_norm() * x.abs().max(1.0).powi(p.coeffs.len() as i32);
            if p.eval(x).abs() > tol {
                break;
            }
            order += 1;
            p = p.derivative();
        }
        // a nonzero polynomial cannot vanish beyond its degree; more means the
        // tolerance itself was not finite
        order.min(degree)
    }

    /// Distinct real roots in `[a, b]`, ascending, each paired with its
    /// multiplicity. Roots are isolated between consecutive critical points,
    /// which are themselves found recursively; roots of even multiplicity show
    /// up as critical points where the polynomial also vanishes.
    pub fn real_roots(&self, a: f64, b: f64, rel_tol: f64) -> Vec<(f64, usize)> {
        assert!(a <= b, "empty interval");
        if self.is_zero() {
            return vec![];
        }
        let candidates = self.root_candidates(a, b, rel_tol);
        let mut roots: Vec<(f64, usize)> = Vec::new();
        for r in candidates {
            if let Some(last) = roots.last() {
                if (r - last.0).abs() <= 1e-9 * (1.0 + r.abs()) {
                    continue;
                }
            }
            let m = self.vanishing_order(r, rel_tol);
            if m > 0 {
                roots.push((r, m));
            }
        }
        roots
    }

    fn root_candidates(&self, a: f64, b: f64, rel_tol: f64) -> Vec<f64> {
        let deg = match self.degree() {
            None | Some(0) => return vec![],
            Some(d) => d,
        };
        if deg == 1 {
            let r = -self.coeffs[0] / self.coeffs[1];
            return if (a..=b).contains(&r) { vec![r] } else { vec![] };
        }
        let mut knots = vec![a];
        knots.extend(self.derivative().root_candidates(a, b, rel_tol));
        knots.push(b);
        knots.dedup();

        let tol = rel_tol * self.coeff_norm() * a.abs().max(b.abs()).max(1.0).powi(deg as i32);
        let mut out = Vec::new();
        for (i, &x) in knots.iter().enumerate() {
            if self.eval(x).abs() <= tol {
                out.push(x);
            }
            if let Some(&y) = knots.get(i + 1) {
                let (fx, fy) = (self.eval(x), self.eval(y));
                if fx.abs() > tol && fy.abs() > tol && fx.signum() != fy.signum() {
                    out.push(self.bisect(x, y));
                }
            }
        }
        out.sort_by(|l, r| l.total_cmp(r));
        out
    }

    fn bisect(&self, mut lo: f64, mut hi: f64) -> f64 {
        let mut flo = self.eval(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let fm = self.eval(mid);
            if fm == 0.0 {
                return mid;
            }
            if fm.signum() == flo.signum() {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        if self.eval(lo).abs() <= self.eval(hi).abs() {
            lo
        } else {
            hi
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_roots(roots: &[f64]) -> Poly {
        roots.iter().fold(Poly::constant(1.0), |p, &r| {
            let mut c = vec![0.0; p.coeffs.len() + 1];
            for (k, &pk) in p.coeffs.iter().enumerate() {
                c[k] -= r * pk;
                c[k + 1] += pk;
            }
            Poly::new(c)
        })
    }

    #[test]
    fn horner_and_derivative() {
        let p = Poly::new(vec![1.0, -2.0, 0.0, 3.0]);
        assert_eq!(p.eval(2.0), 1.0 - 4.0 + 24.0);
        assert_eq!(p.derivative().coeffs(), &[-2.0, 0.0, 9.0]);
        assert_eq!(p.nth_derivative(3).coeffs(), &[18.0]);
        assert!(p.nth_derivative(4).is_zero());
    }

    #[test]
    fn deflation_is_exact_for_exact_roots() {
        let p = from_roots(&[0.5, -1.0, 2.0]);
        let (q, rem) = p.deflate(0.5);
        assert_eq!(rem, 0.0);
        assert_eq!(q, from_roots(&[-1.0, 2.0]));
    }

    #[test]
    fn finds_simple_double_and_endpoint_roots() {
        let p = from_roots(&[0.0, 0.25, 0.25, 0.75, 1.0, 3.0]);
        let roots = p.real_roots(0.0, 1.0, 1e-10);
        let found: Vec<_> = roots.iter().map(|&(r, m)| ((r * 1e8).round() / 1e8, m)).collect();
        assert_eq!(found, vec![(0.0, 1), (0.25, 2), (0.75, 1), (1.0, 1)]);
    }

    #[test]
    fn no_roots_for_positive_polynomial() {
        let p = Poly::new(vec![1.0, 0.0, 1.0]);
        assert!(p.real_roots(-5.0, 5.0, 1e-10).is_empty());
    }

    #[test]
    fn vanishing_order_bounded_by_degree_when_tolerance_overflows() {
        let p = Poly::new(vec![1e306, 0.0, 0.0, -1e307, 2e307, -8e306]);
        assert!(p.vanishing_order(0.5, 1e-10) <= 5);
    }
}
