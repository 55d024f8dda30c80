//! Particle in a box with a quadratic perturbation, corrected to first
//! order: `ψ_n = ψ⁰_n + Σ_{k≠n} c_k ψ⁰_k` with
//! `c_k = <ψ⁰_n| V |ψ⁰_k> / (E⁰_n - E⁰_k)`.

use crate::error::{Error, Result};
use crate::jet::Jet3;

use super::{PhysicalConstants, NODAL_EPSILON};

/// Basis truncation: coefficients decay like `1/(n²-k²)²`, so contributions
/// beyond k = 20 are below 1e-6 of the leading correction.
pub const DEFAULT_BASIS: usize = 20;

#[derive(Debug, Clone)]
pub struct PerturbedPib {
    pub n_state: usize,
    pub n_basis: usize,
    pub strength: f64,
    pub length: f64,
    constants: PhysicalConstants,
    /// First-order coefficients indexed by `k - 1`; the diagonal slot
    /// (`k == n_state`) is identically zero because the sum excludes it.
    coefficients: Vec<f64>,
}

impl PerturbedPib {
    pub fn new(
        n_state: usize,
        n_basis: usize,
        strength: f64,
        length: f64,
        constants: PhysicalConstants,
    ) -> Result<Self> {
        if n_state < 1 {
            return Err(Error::Config("box state index must be >= 1".into()));
        }
        if n_basis <= n_state {
            return Err(Error::Config(format!(
                "basis truncation ({n_basis}) must exceed the state index ({n_state})"
            )));
        }
        let mut pib = PerturbedPib {
            n_state,
            n_basis,
            strength,
            length,
            constants,
            coefficients: Vec::new(),
        };
        pib.coefficients = (1..=n_basis)
            .map(|k| {
                if k == n_state {
                    0.0
                } else {
                    strength * pib.x2_matrix_element(n_state, k)
                        / (pib.unperturbed_energy(n_state) - pib.unperturbed_energy(k))
                }
            })
            .collect();
        Ok(pib)
    }

    /// `E⁰_k = k² ħ² π² / (2 m L²)`.
    pub fn unperturbed_energy(&self, k: usize) -> f64 {
        let c = self.constants;
        let pi = std::f64::consts::PI;
        (k * k) as f64 * c.hbar * c.hbar * pi * pi / (2.0 * c.mass * self.length * self.length)
    }

    /// `<n| x² |k>` for the box eigenstates, off-diagonal closed form.
    pub fn x2_matrix_element(&self, n: usize, k: usize) -> f64 {
        assert_ne!(n, k, "off-diagonal element requested with n == k");
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        let l2 = self.length * self.length;
        let sign = if (n + k).is_multiple_of(2) { 1.0 } else { -1.0 };
        let dm = (n as f64 - k as f64) * (n as f64 - k as f64);
        let dp = (n as f64 + k as f64) * (n as f64 + k as f64);
        2.0 * sign * l2 * (1.0 / (dm * pi2) - 1.0 / (dp * pi2))
    }

    /// `<n| x² |n> = L² (1/3 - 1/(2 n² π²))`.
    pub fn x2_diagonal(&self, n: usize) -> f64 {
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        self.length * self.length * (1.0 / 3.0 - 1.0 / (2.0 * (n * n) as f64 * pi2))
    }

    /// First-order energy `E⁰_n + <n|V|n>`, the reference constant for the
    /// (non-conserved) energy diagnostic of this system.
    pub fn first_order_energy(&self) -> f64 {
        self.unperturbed_energy(self.n_state) + self.strength * self.x2_diagonal(self.n_state)
    }

    /// First-order mixing coefficient for basis state `k` (1-based).
    pub fn coefficient(&self, k: usize) -> f64 {
        self.coefficients[k - 1]
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Unperturbed eigenstate `ψ⁰_k(x) = sqrt(2/L) sin(kπx/L)` as a jet.
    pub fn base_jet(&self, k: usize, x: f64) -> Jet3 {
        let xj = Jet3::variable(x);
        let amp = (2.0 / self.length).sqrt();
        (xj * (k as f64 * std::f64::consts::PI / self.length)).sin() * amp
    }

    /// Perturbed wave-function jet `ψ_n + Σ c_k ψ⁰_k`.
    pub fn psi_jet(&self, x: f64) -> Jet3 {
        let mut acc = self.base_jet(self.n_state, x);
        for (idx, &c) in self.coefficients.iter().enumerate() {
            if c != 0.0 {
                acc = acc + self.base_jet(idx + 1, x) * c;
            }
        }
        acc
    }

    pub fn psi(&self, x: f64) -> f64 {
        self.psi_jet(x).c0
    }

    /// Kinetic ratio of the perturbed wave and its derivative.
    pub fn kinetic_ratio_grad(&self, x: f64) -> Result<(f64, f64)> {
        let j = self.psi_jet(x);
        if j.c0.abs() < NODAL_EPSILON {
            return Err(Error::NodalPoint(vec![x]));
        }
        Ok(super::kinetic_from_jet(j, self.constants))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;
    use std::f64::consts::PI;

    fn pib(n: usize) -> PerturbedPib {
        PerturbedPib::new(n, 20, 10.0, 1.0, PhysicalConstants::default()).unwrap()
    }

    #[test]
    fn ground_state_energy() {
        assert!((pib(1).unperturbed_energy(1) - PI * PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn coefficients_match_quadrature_oracle() {
        let p = pib(1);
        for k in 2..=8usize {
            let integral = integrate(
                &|x| 2.0 * (1.0 * PI * x).sin() * 10.0 * x * x * (k as f64 * PI * x).sin(),
                0.0,
                1.0,
                1e-13,
            )
            .unwrap();
            let oracle = integral / (p.unperturbed_energy(1) - p.unperturbed_energy(k));
            assert!(
                (p.coefficient(k) - oracle).abs() < 1e-10,
                "c_{k}: {} vs oracle {}",
                p.coefficient(k),
                oracle
            );
        }
    }

    #[test]
    fn diagonal_term_is_excluded() {
        let p = pib(3);
        assert_eq!(p.coefficient(3), 0.0);
        assert!(p.coefficient(2) != 0.0 && p.coefficient(4) != 0.0);
    }

    #[test]
    fn truncation_respects_state_index() {
        let r = PerturbedPib::new(3, 3, 10.0, 1.0, PhysicalConstants::default());
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn zero_strength_reduces_to_unperturbed() {
        let p = PerturbedPib::new(1, 20, 0.0, 1.0, PhysicalConstants::default()).unwrap();
        assert!(p.coefficients().iter().all(|&c| c == 0.0));
        let x = 0.37;
        assert!((p.psi(x) - 2f64.sqrt() * (PI * x).sin()).abs() < 1e-14);
    }

    #[test]
    fn coefficients_decay_fast_enough_for_truncation() {
        // Supports the k = 20 cutoff: everything beyond it contributes less
        // than 1e-6 in amplitude.
        let wide = PerturbedPib::new(1, 30, 10.0, 1.0, PhysicalConstants::default()).unwrap();
        for k in 21..=30 {
            assert!(
                wide.coefficient(k).abs() < 1e-6,
                "c_{k} = {}",
                wide.coefficient(k)
            );
        }
    }

    #[test]
    fn perturbed_jet_matches_finite_differences() {
        let p = pib(1);
        let h = 1e-3;
        for &x in &[0.21, 0.5, 0.83] {
            let j = p.psi_jet(x);
            let f = |x: f64| p.psi(x);
            let d2 = (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h)
                - f(x - 2.0 * h))
                / (12.0 * h * h);
            assert!(
                (j.c2 - d2).abs() / d2.abs().max(1.0) < 1e-6,
                "{} vs {d2}",
                j.c2
            );
        }
    }
}
