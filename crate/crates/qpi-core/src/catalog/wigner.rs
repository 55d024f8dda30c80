//! Phase-space quasi-probability distributions and their partial
//! derivatives, as needed by the truncated phase-space evolution residual.

use crate::error::{Error, Result};
use crate::quad::QuadratureRule;

/// Partial derivatives of a Wigner distribution at one phase-space point.
/// `w_p3` is the third momentum derivative, populated only when requested.
#[derive(Debug, Clone, Copy, Default)]
pub struct WignerDerivs {
    pub w_t: f64,
    pub w_x: f64,
    pub w_p: f64,
    pub w_p3: f64,
}

/// A Wigner distribution exposing the partials the evolution residual needs.
pub trait WignerField: Sync {
    fn value(&self, x: f64, p: f64, t: f64) -> Result<f64>;
    fn derivs(&self, x: f64, p: f64, t: f64, need_third: bool) -> Result<WignerDerivs>;
}

/// Oscillator ground-plus-first-excited superposition Wigner function:
/// `W(x,p,t) = e^{-(x²+p²)} (x² + p² + √2 x cos t - √2 p sin t)`.
pub fn wigner_ho(x: f64, p: f64, t: f64) -> f64 {
    let g = x * x + p * p;
    let sqrt2 = std::f64::consts::SQRT_2;
    (-g).exp() * (g + sqrt2 * x * t.cos() - sqrt2 * p * t.sin())
}

/// Closed-form partials of [`wigner_ho`], including the third momentum
/// derivative.
pub fn wigner_ho_derivs(x: f64, p: f64, t: f64) -> WignerDerivs {
    let sqrt2 = std::f64::consts::SQRT_2;
    let (sin_t, cos_t) = t.sin_cos();
    let e = (-(x * x + p * p)).exp();
    let g = x * x + p * p + sqrt2 * x * cos_t - sqrt2 * p * sin_t;
    let g_x = 2.0 * x + sqrt2 * cos_t;
    let g_p = 2.0 * p - sqrt2 * sin_t;
    let w_t = e * (-sqrt2 * x * sin_t - sqrt2 * p * cos_t);
    let w_x = e * (g_x - 2.0 * x * g);
    let w_p = e * (g_p - 2.0 * p * g);
    // Third p-derivative of e^{-p²}·(quadratic in p): g_ppp = 0, g_pp = 2.
    let w_p3 = e * ((-8.0 * p * p * p + 12.0 * p) * g + 3.0 * (4.0 * p * p - 2.0) * g_p - 12.0 * p);
    WignerDerivs {
        w_t,
        w_x,
        w_p,
        w_p3,
    }
}

/// Closed-form oscillator field.
pub struct HarmonicWignerField;

impl WignerField for HarmonicWignerField {
    fn value(&self, x: f64, p: f64, t: f64) -> Result<f64> {
        Ok(wigner_ho(x, p, t))
    }

    fn derivs(&self, x: f64, p: f64, t: f64, _need_third: bool) -> Result<WignerDerivs> {
        Ok(wigner_ho_derivs(x, p, t))
    }
}

/// Integration interval for the truncated sech-well Wigner transform. The
/// integrand decays like `e^{-y}`, falling below the 1e-8 scale by y = 20.
pub const PT_INTERVAL: [f64; 2] = [0.0, 20.0];

/// Default rule: 2048-node composite Gauss–Legendre over [`PT_INTERVAL`]
/// (128 panels of 16 nodes).
pub fn default_pt_rule() -> QuadratureRule {
    QuadratureRule::composite_gauss_legendre(128, 16, PT_INTERVAL[0], PT_INTERVAL[1])
        .expect("static rule parameters are valid")
}

/// Real-part integrand of the sech-well Wigner transform, including its 3/8
/// prefactor. Even in `y`, which justifies folding the integral onto the
/// positive half-axis.
pub fn pt_integrand(x: f64, k: f64, t: f64, y: f64) -> f64 {
    let a = x + 0.5 * y;
    let b = x - 0.5 * y;
    let sech_a = 1.0 / a.cosh();
    let sech_b = 1.0 / b.cosh();
    let sinh_a = a.sinh();
    let sinh_b = b.sinh();
    let bracket = 2.0 * sinh_a * sinh_b * (k * y).cos()
        + std::f64::consts::SQRT_2 * sinh_b * (1.5 * t - k * y).cos()
        + std::f64::consts::SQRT_2 * sinh_a * (-1.5 * t - k * y).cos()
        + (k * y).cos();
    0.375 * sech_a * sech_a * sech_b * sech_b * bracket
}

/// Truncated Wigner transform of the sech-well state: the half-axis
/// integral of [`pt_integrand`] doubled (`(3/4)∫₀²⁰ ...` overall).
pub fn wigner_pt(x: f64, k: f64, t: f64, rule: &QuadratureRule) -> Result<f64> {
    if (rule.interval[0] - PT_INTERVAL[0]).abs() > 1e-9
        || (rule.interval[1] - PT_INTERVAL[1]).abs() > 1e-9
    {
        return Err(Error::Config(format!(
            "quadrature rule covers [{}, {}], need [{}, {}]",
            rule.interval[0], rule.interval[1], PT_INTERVAL[0], PT_INTERVAL[1]
        )));
    }
    Ok(rule.apply(|y| 2.0 * pt_integrand(x, k, t, y)))
}

/// Sech-well Wigner field. The transform itself is smooth, so partials are
/// taken by central differences over the quadrature evaluator: step 1e-3 for
/// the first derivatives, a 5-point stencil with step 5e-3 for the third
/// momentum derivative.
pub struct PtWignerField {
    rule: QuadratureRule,
}

pub const PT_FD_STEP: f64 = 1e-3;
pub const PT_FD_STEP_THIRD: f64 = 5e-3;

impl PtWignerField {
    pub fn new(rule: QuadratureRule) -> Result<Self> {
        // Validate the interval once up front.
        wigner_pt(0.0, 0.0, 0.0, &rule)?;
        Ok(PtWignerField { rule })
    }

    pub fn with_default_rule() -> Self {
        PtWignerField {
            rule: default_pt_rule(),
        }
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }
}

impl WignerField for PtWignerField {
    fn value(&self, x: f64, k: f64, t: f64) -> Result<f64> {
        wigner_pt(x, k, t, &self.rule)
    }

    fn derivs(&self, x: f64, k: f64, t: f64, need_third: bool) -> Result<WignerDerivs> {
        let h = PT_FD_STEP;
        let f = |x, k, t| wigner_pt(x, k, t, &self.rule);
        let w_x = (f(x + h, k, t)? - f(x - h, k, t)?) / (2.0 * h);
        let w_p = (f(x, k + h, t)? - f(x, k - h, t)?) / (2.0 * h);
        let w_t = (f(x, k, t + h)? - f(x, k, t - h)?) / (2.0 * h);
        let w_p3 = if need_third {
            let h3 = PT_FD_STEP_THIRD;
            (f(x, k + 2.0 * h3, t)? - 2.0 * f(x, k + h3, t)? + 2.0 * f(x, k - h3, t)?
                - f(x, k - 2.0 * h3, t)?)
                / (2.0 * h3 * h3 * h3)
        } else {
            0.0
        };
        Ok(WignerDerivs {
            w_t,
            w_x,
            w_p,
            w_p3,
        })
    }
}
