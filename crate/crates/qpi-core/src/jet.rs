//! Truncated Taylor arithmetic for exact forward-mode derivative propagation.
//!
//! [`Jet3`] carries a value and its first three derivatives with respect to a
//! single scalar input; [`Dual2D`] carries a value and its two first-order
//! partials. Arithmetic follows the product and chain rules exactly, so the
//! propagated coefficients are the true derivatives of the composed
//! expression up to floating-point rounding, with none of the truncation
//! error of finite differences.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Value and raw derivatives `(f, f', f'', f''')` of a scalar function of one
/// variable. Coefficients are stored as plain derivatives, not divided by k!.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet3 {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl Jet3 {
    pub const ZERO: Jet3 = Jet3 {
        c0: 0.0,
        c1: 0.0,
        c2: 0.0,
        c3: 0.0,
    };

    pub fn new(c0: f64, c1: f64, c2: f64, c3: f64) -> Self {
        Jet3 { c0, c1, c2, c3 }
    }

    /// Jet of a constant: all derivative slots are zero.
    pub fn constant(c: f64) -> Self {
        Jet3 {
            c0: c,
            c1: 0.0,
            c2: 0.0,
            c3: 0.0,
        }
    }

    /// Seed jet of the identity input, `(x, 1, 0, 0)`.
    pub fn variable(x: f64) -> Self {
        Jet3 {
            c0: x,
            c1: 1.0,
            c2: 0.0,
            c3: 0.0,
        }
    }

    /// Chain rule (Faà di Bruno to third order): builds the jet of `f ∘ u`
    /// for `u = self`, given the derivatives `[f, f', f'', f''']` of the
    /// outer function evaluated at `u.c0`.
    pub fn compose(self, f: [f64; 4]) -> Self {
        let (u1, u2, u3) = (self.c1, self.c2, self.c3);
        Jet3 {
            c0: f[0],
            c1: f[1] * u1,
            c2: f[1] * u2 + f[2] * u1 * u1,
            c3: f[1] * u3 + 3.0 * f[2] * u1 * u2 + f[3] * u1 * u1 * u1,
        }
    }

    pub fn exp(self) -> Self {
        let e = self.c0.exp();
        self.compose([e, e, e, e])
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.c0.sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.c0.sin_cos();
        self.compose([c, -s, -c, s])
    }

    pub fn tanh(self) -> Self {
        let t = self.c0.tanh();
        let s = 1.0 - t * t;
        self.compose([t, s, -2.0 * t * s, s * (6.0 * t * t - 2.0)])
    }

    pub fn sech(self) -> Self {
        let h = 1.0 / self.c0.cosh();
        let t = self.c0.tanh();
        self.compose([
            h,
            -h * t,
            h * (1.0 - 2.0 * h * h),
            -h * t * (1.0 - 6.0 * h * h),
        ])
    }

    pub fn sqrt(self) -> Self {
        let s = self.c0.sqrt();
        self.compose([s, 0.5 / s, -0.25 / (s * s * s), 0.375 / (s * s * s * s * s)])
    }

    /// Integer power by repeated multiplication (exact product rule).
    pub fn powi(self, n: u32) -> Self {
        let mut acc = Jet3::constant(1.0);
        for _ in 0..n {
            acc = acc * self;
        }
        acc
    }

    pub fn recip(self) -> Self {
        Jet3::constant(1.0) / self
    }

    /// Taylor evaluation `Σ_k c_k h^k / k!`.
    pub fn taylor_eval(self, h: f64) -> f64 {
        self.c0 + self.c1 * h + self.c2 * h * h / 2.0 + self.c3 * h * h * h / 6.0
    }
}

impl Add for Jet3 {
    type Output = Jet3;
    fn add(self, o: Jet3) -> Jet3 {
        Jet3::new(
            self.c0 + o.c0,
            self.c1 + o.c1,
            self.c2 + o.c2,
            self.c3 + o.c3,
        )
    }
}

impl Sub for Jet3 {
    type Output = Jet3;
    fn sub(self, o: Jet3) -> Jet3 {
        Jet3::new(
            self.c0 - o.c0,
            self.c1 - o.c1,
            self.c2 - o.c2,
            self.c3 - o.c3,
        )
    }
}

impl Neg for Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        Jet3::new(-self.c0, -self.c1, -self.c2, -self.c3)
    }
}

impl Mul for Jet3 {
    type Output = Jet3;
    /// Leibniz rule on raw derivatives.
    fn mul(self, o: Jet3) -> Jet3 {
        Jet3 {
            c0: self.c0 * o.c0,
            c1: self.c1 * o.c0 + self.c0 * o.c1,
            c2: self.c2 * o.c0 + 2.0 * self.c1 * o.c1 + self.c0 * o.c2,
            c3: self.c3 * o.c0 + 3.0 * self.c2 * o.c1 + 3.0 * self.c1 * o.c2 + self.c0 * o.c3,
        }
    }
}

impl Div for Jet3 {
    type Output = Jet3;
    /// Quotient jets from inverting the Leibniz expansion of `q * b = a`.
    fn div(self, b: Jet3) -> Jet3 {
        let q0 = self.c0 / b.c0;
        let q1 = (self.c1 - q0 * b.c1) / b.c0;
        let q2 = (self.c2 - q0 * b.c2 - 2.0 * q1 * b.c1) / b.c0;
        let q3 = (self.c3 - q0 * b.c3 - 3.0 * q1 * b.c2 - 3.0 * q2 * b.c1) / b.c0;
        Jet3::new(q0, q1, q2, q3)
    }
}

impl Mul<f64> for Jet3 {
    type Output = Jet3;
    fn mul(self, s: f64) -> Jet3 {
        Jet3::new(self.c0 * s, self.c1 * s, self.c2 * s, self.c3 * s)
    }
}

impl Add<f64> for Jet3 {
    type Output = Jet3;
    fn add(self, s: f64) -> Jet3 {
        Jet3::new(self.c0 + s, self.c1, self.c2, self.c3)
    }
}

impl Sub<f64> for Jet3 {
    type Output = Jet3;
    fn sub(self, s: f64) -> Jet3 {
        Jet3::new(self.c0 - s, self.c1, self.c2, self.c3)
    }
}

/// Value plus first-order partials with respect to two independent inputs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dual2D {
    pub v: f64,
    pub dx: f64,
    pub dy: f64,
}

impl Dual2D {
    pub fn new(v: f64, dx: f64, dy: f64) -> Self {
        Dual2D { v, dx, dy }
    }

    pub fn constant(c: f64) -> Self {
        Dual2D {
            v: c,
            dx: 0.0,
            dy: 0.0,
        }
    }

    /// Seed for the first input: `(x, 1, 0)`.
    pub fn var_x(x: f64) -> Self {
        Dual2D {
            v: x,
            dx: 1.0,
            dy: 0.0,
        }
    }

    /// Seed for the second input: `(y, 0, 1)`.
    pub fn var_y(y: f64) -> Self {
        Dual2D {
            v: y,
            dx: 0.0,
            dy: 1.0,
        }
    }

    /// Chain rule given `[f, f']` of the outer function at `self.v`.
    pub fn compose(self, f: [f64; 2]) -> Self {
        Dual2D {
            v: f[0],
            dx: f[1] * self.dx,
            dy: f[1] * self.dy,
        }
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.compose([e, e])
    }

    pub fn tanh(self) -> Self {
        let t = self.v.tanh();
        self.compose([t, 1.0 - t * t])
    }
}

impl Add for Dual2D {
    type Output = Dual2D;
    fn add(self, o: Dual2D) -> Dual2D {
        Dual2D::new(self.v + o.v, self.dx + o.dx, self.dy + o.dy)
    }
}

impl Sub for Dual2D {
    type Output = Dual2D;
    fn sub(self, o: Dual2D) -> Dual2D {
        Dual2D::new(self.v - o.v, self.dx - o.dx, self.dy - o.dy)
    }
}

impl Mul for Dual2D {
    type Output = Dual2D;
    fn mul(self, o: Dual2D) -> Dual2D {
        Dual2D::new(
            self.v * o.v,
            self.dx * o.v + self.v * o.dx,
            self.dy * o.v + self.v * o.dy,
        )
    }
}

impl Mul<f64> for Dual2D {
    type Output = Dual2D;
    fn mul(self, s: f64) -> Dual2D {
        Dual2D::new(self.v * s, self.dx * s, self.dy * s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn central_diffs(f: impl Fn(f64) -> f64, x: f64, h: f64) -> (f64, f64, f64) {
        let d1 = (f(x + h) - f(x - h)) / (2.0 * h);
        let d2 = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
        let d3 =
            (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h);
        (d1, d2, d3)
    }

    #[test]
    fn seed_is_identity() {
        let j = Jet3::variable(1.75);
        assert_eq!(j, Jet3::new(1.75, 1.0, 0.0, 0.0));
    }

    #[test]
    fn affine_jet_of_seed() {
        // w*x + b propagates to (w*x + b, w, 0, 0)
        let j = Jet3::variable(0.4) * 2.5 + 3.0;
        assert_eq!(j, Jet3::new(4.0, 2.5, 0.0, 0.0));
    }

    #[test]
    fn product_and_chain_rules_match_finite_differences() {
        let mut rng = Rng::new(11);
        let f = |x: f64| (x * 0.7).sin() * (-0.3 * x * x).exp() + x.tanh() / (2.0 + x.cosh());
        let jet_f = |x: f64| {
            let j = Jet3::variable(x);
            (j * 0.7).sin() * (j * j * (-0.3)).exp() + j.tanh() / (j.sech().recip() + 2.0)
        };
        for _ in 0..50 {
            let x = rng.range(-2.0, 2.0);
            let j = jet_f(x);
            let (d1, d2, d3) = central_diffs(f, x, 1e-4);
            assert!((j.c0 - f(x)).abs() < 1e-14);
            assert!(
                (j.c1 - d1).abs() / d1.abs().max(1.0) < 1e-6,
                "c1 {} vs {}",
                j.c1,
                d1
            );
            assert!(
                (j.c2 - d2).abs() / d2.abs().max(1.0) < 1e-5,
                "c2 {} vs {}",
                j.c2,
                d2
            );
            let (_, _, d3b) = central_diffs(f, x, 1e-2);
            let _ = d3;
            assert!(
                (j.c3 - d3b).abs() / d3b.abs().max(1.0) < 1e-3,
                "c3 {} vs {}",
                j.c3,
                d3b
            );
        }
    }

    #[test]
    fn quotient_jets_invert_product() {
        let a = Jet3::new(0.8, -0.2, 1.4, 0.6);
        let b = Jet3::new(1.7, 0.9, -0.4, 0.2);
        let q = a / b;
        let back = q * b;
        assert!((back.c0 - a.c0).abs() < 1e-13);
        assert!((back.c1 - a.c1).abs() < 1e-13);
        assert!((back.c2 - a.c2).abs() < 1e-13);
        assert!((back.c3 - a.c3).abs() < 1e-13);
    }

    #[test]
    fn taylor_truncation_is_fourth_order() {
        let jet_f = |x: f64| {
            let j = Jet3::variable(x);
            (j * 1.3).sin() * (j * (-0.5)).exp()
        };
        let f = |x: f64| (1.3 * x).sin() * (-0.5 * x).exp();
        let j = jet_f(0.37);
        let err_at = |h: f64| (f(0.37 + h) - j.taylor_eval(h)).abs();
        let e1 = err_at(0.08);
        let e2 = err_at(0.04);
        assert!(
            e1 / e2 >= 15.0,
            "halving h should cut the O(h^4) remainder ~16x: {e1} {e2}"
        );
    }

    #[test]
    fn dual2_partials_match_finite_differences() {
        let g = |x: f64, y: f64| (x * y).tanh() + (-(x * x + 0.5 * y)).exp();
        let dual_g = |x: f64, y: f64| {
            let dx = Dual2D::var_x(x);
            let dy = Dual2D::var_y(y);
            (dx * dy).tanh() + ((dx * dx + dy * 0.5) * -1.0).exp()
        };
        let mut rng = Rng::new(3);
        for _ in 0..30 {
            let (x, y) = (rng.range(-1.5, 1.5), rng.range(-1.5, 1.5));
            let d = dual_g(x, y);
            let h = 1e-5;
            let fx = (g(x + h, y) - g(x - h, y)) / (2.0 * h);
            let fy = (g(x, y + h) - g(x, y - h)) / (2.0 * h);
            assert!((d.v - g(x, y)).abs() < 1e-14);
            assert!((d.dx - fx).abs() < 1e-8);
            assert!((d.dy - fy).abs() < 1e-8);
        }
    }
}
