//! Abstraction over potential models: the learned network and closed-form
//! oracles both expose values and input derivatives through this trait, so
//! losses and metrics can be exercised with either.

use crate::error::{Error, Result};
use crate::jet::{Dual2D, Jet3};

pub trait PotentialFn: Sync {
    /// Plain value at a point of the model's input dimension.
    fn value(&self, point: &[f64]) -> Result<f64>;

    /// Value and first three derivatives with respect to a scalar input.
    fn jet1d(&self, x: f64) -> Result<Jet3>;

    /// Value and both first partials for two-dimensional inputs.
    fn dual2(&self, x: f64, y: f64) -> Result<Dual2D>;
}

/// Closed-form 1D potential given by a jet-valued function.
pub struct ClosedForm1D<F: Fn(f64) -> Jet3 + Sync>(pub F);

impl<F: Fn(f64) -> Jet3 + Sync> PotentialFn for ClosedForm1D<F> {
    fn value(&self, point: &[f64]) -> Result<f64> {
        Ok((self.0)(point[0]).c0)
    }

    fn jet1d(&self, x: f64) -> Result<Jet3> {
        Ok((self.0)(x))
    }

    fn dual2(&self, _x: f64, _y: f64) -> Result<Dual2D> {
        Err(Error::Config(
            "closed-form 1D potential has no 2D evaluation".into(),
        ))
    }
}

/// Closed-form potential of two variables.
pub struct ClosedForm2D<F: Fn(f64, f64) -> Dual2D + Sync>(pub F);

impl<F: Fn(f64, f64) -> Dual2D + Sync> PotentialFn for ClosedForm2D<F> {
    fn value(&self, point: &[f64]) -> Result<f64> {
        Ok((self.0)(point[0], point[1]).v)
    }

    fn jet1d(&self, _x: f64) -> Result<Jet3> {
        Err(Error::Config(
            "closed-form 2D potential has no 1D jet".into(),
        ))
    }

    fn dual2(&self, x: f64, y: f64) -> Result<Dual2D> {
        Ok((self.0)(x, y))
    }
}
