//! Numerical integration: Gauss–Legendre rules and an adaptive Simpson
//! integrator for matrix elements and normalization integrals.

use crate::error::{Error, Result};

/// Fixed quadrature rule: abscissae, weights, and the interval they cover.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub interval: [f64; 2],
}

impl QuadratureRule {
    /// `n`-point Gauss–Legendre rule on `[a, b]`. Nodes are the roots of the
    /// Legendre polynomial `P_n`, found by Newton iteration from the usual
    /// Chebyshev-like initial guesses.
    pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("quadrature order must be nonzero".into()));
        }
        if a >= b || !a.is_finite() || !b.is_finite() {
            return Err(Error::Config(format!("bad quadrature interval [{a}, {b}]")));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let half = (b - a) * 0.5;
        let mid = (b + a) * 0.5;
        // Roots come in symmetric pairs; solve the upper half.
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_and_deriv(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = mid - half * x;
            nodes[n - 1 - i] = mid + half * x;
            weights[i] = w * half;
            weights[n - 1 - i] = w * half;
        }
        Ok(QuadratureRule {
            nodes,
            weights,
            interval: [a, b],
        })
    }

    /// Composite rule: `panels` consecutive Gauss–Legendre panels of
    /// `order` points each across `[a, b]`.
    pub fn composite_gauss_legendre(panels: usize, order: usize, a: f64, b: f64) -> Result<Self> {
        if panels == 0 {
            return Err(Error::Config("need at least one panel".into()));
        }
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        let width = (b - a) / panels as f64;
        for p in 0..panels {
            let lo = a + p as f64 * width;
            let panel = QuadratureRule::gauss_legendre(order, lo, lo + width)?;
            nodes.extend_from_slice(&panel.nodes);
            weights.extend_from_slice(&panel.weights);
        }
        Ok(QuadratureRule {
            nodes,
            weights,
            interval: [a, b],
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn apply(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(self.weights.iter())
            .map(|(&x, &w)| w * f(x))
            .collect();
        crate::parallel::pairwise_sum(&terms)
    }
}

fn legendre_and_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Adaptive Simpson integration of `f` on `[a, b]` to absolute tolerance
/// `tol`. Subdivision stops when the Richardson error estimate is below the
/// locally apportioned tolerance; exceeding the depth limit is reported as
/// non-convergence.
///
/// The interval is first split at golden-section points. Dyadic bisection
/// alone can sample a periodic integrand exactly at its zeros (every probe
/// of `sin(4πx)` on [0, 1] lands on a node) and silently return zero; the
/// irrational split breaks any such alignment.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a >= b || !a.is_finite() || !b.is_finite() {
        return Err(Error::Config(format!(
            "integrate: need finite a < b, got [{a}, {b}]"
        )));
    }
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let cuts = [a, b - INV_PHI * (b - a), a + INV_PHI * (b - a), b];
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let flo = f(lo);
        let fhi = f(hi);
        let m = 0.5 * (lo + hi);
        let fm = f(m);
        if !flo.is_finite() || !fhi.is_finite() || !fm.is_finite() {
            return Err(Error::Config(
                "integrate: integrand not finite on [a, b]".into(),
            ));
        }
        let whole = simpson(lo, hi, flo, fm, fhi);
        total += adaptive(f, lo, hi, flo, fm, fhi, whole, tol / 3.0, 44)?;
    }
    Ok(total)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Quadrature(format!(
            "subdivision limit reached on [{a}, {b}] (err est {:.3e} > tol {:.3e})",
            delta.abs() / 15.0,
            tol
        )));
    }
    let half_tol = 0.5 * tol;
    Ok(adaptive(f, a, m, fa, flm, fm, left, half_tol, depth - 1)?
        + adaptive(f, m, b, fm, frm, fb, right, half_tol, depth - 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn weights_sum_to_interval_length() {
        for &(n, a, b) in &[(4usize, 0.0, 1.0), (16, -2.5, 3.5), (48, 0.0, 20.0)] {
            let rule = QuadratureRule::gauss_legendre(n, a, b).unwrap();
            let total: f64 = rule.weights.iter().sum();
            assert!((total - (b - a)).abs() < 1e-12 * (b - a).abs());
        }
        let comp = QuadratureRule::composite_gauss_legendre(128, 16, 0.0, 20.0).unwrap();
        assert_eq!(comp.len(), 2048);
        let total: f64 = comp.weights.iter().sum();
        assert!((total - 20.0).abs() < 1e-11);
    }

    #[test]
    fn polynomial_exactness() {
        // n-point Gauss-Legendre is exact through degree 2n-1.
        let rule = QuadratureRule::gauss_legendre(8, -1.0, 2.0).unwrap();
        for deg in 0..=15u32 {
            let got = rule.apply(|x| x.powi(deg as i32));
            let expect =
                (2f64.powi(deg as i32 + 1) - (-1f64).powi(deg as i32 + 1)) / (deg as f64 + 1.0);
            assert!(
                (got - expect).abs() <= 1e-12 * expect.abs().max(1.0),
                "degree {deg}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn box_ground_state_is_normalized() {
        let got = integrate(&|x| 2.0 * (PI * x).sin().powi(2), 0.0, 1.0, 1e-13).unwrap();
        assert!((got - 1.0).abs() < 1e-12);
    }

    #[test]
    fn simple_closed_forms() {
        let got = integrate(&|x| x * x, 0.0, 1.0, 1e-13).unwrap();
        assert!((got - 1.0 / 3.0).abs() < 1e-13);
        let got = integrate(&|y| (-y).exp(), 0.0, 20.0, 1e-13).unwrap();
        assert!((got - (1.0 - (-20.0f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn reports_non_convergence() {
        // An integrable endpoint singularity cannot reach 1e-14 within the
        // subdivision budget.
        let res = integrate(&|x: f64| x.max(1e-300).powf(-0.9), 0.0, 1.0, 1e-14);
        assert!(matches!(res, Err(Error::Quadrature(_))));
    }

    #[test]
    fn rejects_bad_interval() {
        assert!(matches!(
            integrate(&|x| x, 1.0, 0.0, 1e-6),
            Err(Error::Config(_))
        ));
    }
}
