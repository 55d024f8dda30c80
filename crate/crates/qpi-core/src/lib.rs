//! Reconstruction of effective quantum potentials from probability
//! amplitudes.
//!
//! A small fixed feed-forward network parameterizes the potential; losses
//! built from stationary and time-dependent Schrödinger residuals (and from
//! truncated phase-space evolution residuals) are minimized with Adam. All
//! input derivatives of the network come from exact forward-mode Taylor
//! propagation, and parameter gradients from reverse accumulation through
//! that jet arithmetic. Closed-form reference systems, quadrature, a
//! fourth-order Runge–Kutta baseline, and report metrics round out the
//! pipeline.
//!
//! Batch evaluation is data-parallel over points (rayon, behind the default
//! `parallel` feature) with deterministic fixed-order reductions, so results
//! are bit-identical across thread counts and with the sequential fallback.

pub mod catalog;
pub mod error;
pub mod jet;
pub mod loss;
pub mod metrics;
pub mod net;
pub mod parallel;
pub mod potential;
pub mod quad;
pub mod rng;
pub mod sample;
pub mod train;

pub use catalog::{ComplexAmp, PhysicalConstants, SystemKind, SystemSpec};
pub use error::{Error, Result};
pub use jet::{Dual2D, Jet3};
pub use loss::{LossKind, LossSpec, SampleBatch};
pub use metrics::{Method, MetricsReport};
pub use net::{FinalActivation, Mlp, MlpConfig};
pub use potential::PotentialFn;
pub use rng::Rng;
pub use train::{Model, TrainConfig, TrainingHistory};
