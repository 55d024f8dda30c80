//! Uniform domain sampling with nodal rejection.

use crate::catalog::{SystemSpec, NODAL_EPSILON};
use crate::error::{Error, Result};
use crate::loss::SampleBatch;
use crate::rng::Rng;

/// Draw `n` points uniformly from the system's domain, rejecting points
/// where the amplitude magnitude falls below the nodal threshold (systems
/// without an amplitude skip the check). Deterministic for a given RNG
/// state. Pathological node density aborts after `1000·n` rejections.
pub fn sample_domain(spec: &SystemSpec, n: usize, rng: &mut Rng) -> Result<SampleBatch> {
    if n == 0 {
        return Err(Error::Config("cannot sample zero points".into()));
    }
    sample_with_reject(&spec.domain, n, rng, |point| {
        spec.amp_abs(point)
            .map(|a| a.is_none_or(|abs| abs >= NODAL_EPSILON))
    })
}

pub(crate) fn sample_with_reject(
    domain: &[[f64; 2]],
    n: usize,
    rng: &mut Rng,
    accept: impl Fn(&[f64]) -> Result<bool>,
) -> Result<SampleBatch> {
    let mut batch = SampleBatch::new(domain.len());
    let mut rejections = 0usize;
    let mut point = vec![0.0; domain.len()];
    while batch.len() < n {
        for (c, iv) in point.iter_mut().zip(domain.iter()) {
            *c = rng.range(iv[0], iv[1]);
        }
        if accept(&point)? {
            batch.push(&point);
        } else {
            rejections += 1;
            if rejections > 1000 * n {
                return Err(Error::Sampling(format!(
                    "rejected {rejections} candidates while drawing {n} points"
                )));
            }
        }
    }
    Ok(batch)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oscillator_points_stay_in_range() {
        let spec = SystemSpec::harmonic_1d(0);
        let mut rng = Rng::new(1);
        let batch = sample_domain(&spec, 2500, &mut rng).unwrap();
        assert_eq!(batch.len(), 2500);
        assert!(batch.iter().all(|p| (-5.0..=5.0).contains(&p[0])));
    }

    #[test]
    fn radial_points_respect_the_cutoff() {
        let spec = SystemSpec::hydrogen_radial(2, 1).unwrap();
        let mut rng = Rng::new(2);
        let batch = sample_domain(&spec, 500, &mut rng).unwrap();
        assert!(batch.iter().all(|p| (0.5..=10.0).contains(&p[0])));
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = SystemSpec::poschl_teller(2, 1).unwrap();
        let a = sample_domain(&spec, 100, &mut Rng::new(9)).unwrap();
        let b = sample_domain(&spec, 100, &mut Rng::new(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn nodes_are_rejected() {
        let spec = SystemSpec::harmonic_1d(3);
        let mut rng = Rng::new(3);
        let batch = sample_domain(&spec, 1000, &mut rng).unwrap();
        for p in batch.iter() {
            assert!(spec.amp_abs(p).unwrap().unwrap() >= NODAL_EPSILON);
        }
    }

    #[test]
    fn hopeless_rejection_rates_abort() {
        let mut rng = Rng::new(4);
        let res = sample_with_reject(&[[0.0, 1.0]], 5, &mut rng, |_| Ok(false));
        assert!(matches!(res, Err(Error::Sampling(_))));
    }

    #[test]
    fn phase_space_systems_sample_three_coordinates() {
        let spec = SystemSpec::wigner_pt();
        let mut rng = Rng::new(5);
        let batch = sample_domain(&spec, 50, &mut rng).unwrap();
        assert_eq!(batch.dim(), 3);
        assert!(batch
            .iter()
            .all(|p| p.iter().all(|c| (0.0..=1.0).contains(c))));
    }
}
