//! Fixed Gaussian-sum density model for the hydrogen molecule along its
//! internal coordinate.
//!
//! One electron is described by the symmetric sum of two three-Gaussian 1s
//! contractions centered at plus/minus half the equilibrium bond length
//! (1.346 Å converted to atomic units). The contraction parameters are the
//! standard published hydrogen 1s set. The density is the square of that
//! sum, normalized over the working interval [-3, 3].
//!
//! The reference potential is defined through the constant-energy relation:
//! `V(x) = K(x_re) - K(x)` with `K` the kinetic ratio of the amplitude,
//! which pins `V(x_re) = 0` and makes the energy curve flat by construction.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::jet::Jet3;
use crate::quad::integrate;

use super::{kinetic_from_jet, PhysicalConstants};

/// Standard three-Gaussian hydrogen 1s contraction.
pub const EXPONENTS: [f64; 3] = [3.425_250_91, 0.623_913_73, 0.168_855_40];
pub const COEFFICIENTS: [f64; 3] = [0.154_328_97, 0.535_328_14, 0.444_634_54];

const BOND_LENGTH_ANGSTROM: f64 = 1.346;
const ANGSTROM_PER_BOHR: f64 = 0.529_177_210_903;

pub const DOMAIN: [f64; 2] = [-3.0, 3.0];

/// Equilibrium bond length in atomic units; the reference potential is
/// pinned to zero at this coordinate.
pub fn equilibrium_coordinate() -> f64 {
    BOND_LENGTH_ANGSTROM / ANGSTROM_PER_BOHR
}

/// Unnormalized symmetric contraction sum as a jet.
fn contraction_jet(x: f64) -> Jet3 {
    let c = 0.5 * equilibrium_coordinate();
    let xj = Jet3::variable(x);
    let mut acc = Jet3::ZERO;
    for (&alpha, &d) in EXPONENTS.iter().zip(COEFFICIENTS.iter()) {
        let norm = (2.0 * alpha / std::f64::consts::PI).powf(0.75);
        let left = xj + c;
        let right = xj - c;
        acc =
            acc + ((left * left * (-alpha)).exp() + (right * right * (-alpha)).exp()) * (d * norm);
    }
    acc
}

fn norm_integral() -> f64 {
    static NORM: OnceLock<f64> = OnceLock::new();
    *NORM.get_or_init(|| {
        integrate(
            &|x| contraction_jet(x).c0.powi(2),
            DOMAIN[0],
            DOMAIN[1],
            1e-12,
        )
        .expect("contraction is smooth and finite on the domain")
    })
}

/// Normalized one-electron density.
pub fn density(x: f64) -> Result<f64> {
    if !(DOMAIN[0]..=DOMAIN[1]).contains(&x) {
        return Err(Error::Domain(format!(
            "h2: {x} outside [{}, {}]",
            DOMAIN[0], DOMAIN[1]
        )));
    }
    let phi = contraction_jet(x).c0;
    Ok(phi * phi / norm_integral())
}

/// Amplitude proxy `sqrt(density)` (the contraction is strictly positive, so
/// no sign bookkeeping is needed).
pub fn amplitude(x: f64) -> f64 {
    contraction_jet(x).c0 / norm_integral().sqrt()
}

pub fn amplitude_jet(x: f64) -> Jet3 {
    contraction_jet(x) * (1.0 / norm_integral().sqrt())
}

/// Constant reference energy `K(x_re)`.
pub fn reference_energy(c: PhysicalConstants) -> f64 {
    kinetic_from_jet(amplitude_jet(equilibrium_coordinate()), c).0
}

/// Reference potential `K(x_re) - K(x)`; zero at the equilibrium coordinate.
pub fn true_potential(x: f64, c: PhysicalConstants) -> f64 {
    reference_energy(c) - kinetic_from_jet(amplitude_jet(x), c).0
}

/// Potential and its first derivative.
pub fn true_potential_grad(x: f64, c: PhysicalConstants) -> (f64, f64) {
    let (k, dk) = kinetic_from_jet(amplitude_jet(x), c);
    (reference_energy(c) - k, -dk)
}
