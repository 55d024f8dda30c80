//! Domain sampling, Adam optimization loop, and training-history capture.

use std::time::Instant;

use crate::catalog::SystemSpec;
use crate::error::{Error, Result};
use crate::loss::{LossKind, LossSpec, Objective};
use crate::net::Mlp;
use crate::rng::Rng;
use crate::sample::sample_domain;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub dataset_size: usize,
    pub seed: u64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 1000,
            batch_size: 32,
            learning_rate: 1e-3,
            dataset_size: 2500,
            seed: 0,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::Config("need at least one epoch".into()));
        }
        if self.batch_size == 0 || self.dataset_size < self.batch_size {
            return Err(Error::Config(format!(
                "dataset size ({}) must be at least the batch size ({})",
                self.dataset_size, self.batch_size
            )));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::Config(format!(
                "bad learning rate {}",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

/// The model being optimized: one potential network, or the potential/wave
/// pair used by the supervised box experiment.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Single(Mlp),
    PibPair { potential: Mlp, wave: Mlp },
}

impl Model {
    pub fn potential(&self) -> &Mlp {
        match self {
            Model::Single(m) => m,
            Model::PibPair { potential, .. } => potential,
        }
    }

    pub fn wave(&self) -> Option<&Mlp> {
        match self {
            Model::Single(_) => None,
            Model::PibPair { wave, .. } => Some(wave),
        }
    }

    pub fn checksum(&self) -> u64 {
        match self {
            Model::Single(m) => m.params_checksum(),
            Model::PibPair { potential, wave } => {
                potential.params_checksum() ^ wave.params_checksum().rotate_left(1)
            }
        }
    }

    fn matches_loss(&self, kind: LossKind) -> Result<()> {
        let needs_pair = kind == LossKind::SupervisedPib;
        let is_pair = matches!(self, Model::PibPair { .. });
        if needs_pair != is_pair {
            return Err(Error::Config(
                "supervised box training takes a potential/wave pair; every other loss takes \
                 a single network"
                    .into(),
            ));
        }
        Ok(())
    }
}

/// Per-epoch record of a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingHistory {
    pub epoch_loss: Vec<f64>,
    pub epoch_seconds: Vec<f64>,
    pub params_checksum: u64,
}

impl TrainingHistory {
    /// CSV with columns `epoch,loss,seconds`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,loss,seconds\n");
        for (i, (l, s)) in self
            .epoch_loss
            .iter()
            .zip(self.epoch_seconds.iter())
            .enumerate()
        {
            out.push_str(&format!(
                "{i},{},{}\n",
                crate::metrics::fmt_float(*l),
                crate::metrics::fmt_float(*s)
            ));
        }
        out
    }
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    lr: f64,
}

impl Adam {
    fn new(n: usize, cfg: &TrainConfig) -> Self {
        Adam {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
            beta1: cfg.adam_beta1,
            beta2: cfg.adam_beta2,
            eps: cfg.adam_eps,
            lr: cfg.learning_rate,
        }
    }

    fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}

/// Train a model against a system/loss pair. A pure function of
/// `(config, loss, spec, init)`: the dataset is drawn once from the seeded
/// stream, shuffled each epoch, and consumed in minibatches with standard
/// bias-corrected Adam updates. Batches that trip the nodal guard are
/// redrawn from the same stream.
pub fn train(
    config: &TrainConfig,
    loss: &LossSpec,
    spec: &SystemSpec,
    init: Model,
) -> Result<(Model, TrainingHistory)> {
    config.validate()?;
    loss.validate(&init.potential().config)?;
    init.matches_loss(loss.kind)?;

    let mut rng = Rng::new(config.seed);
    let dataset = sample_domain(spec, config.dataset_size, &mut rng)?;
    let objective = Objective::prepare(loss, spec, &dataset)?;

    let mut model = init;
    let n_pot = model.potential().n_params();
    let n_wave = model.wave().map(|w| w.n_params()).unwrap_or(0);
    let mut adam_pot = Adam::new(n_pot, config);
    let mut adam_wave = Adam::new(n_wave, config);
    let mut grad_pot = vec![0.0; n_pot];
    let mut grad_wave = vec![0.0; n_wave];

    let mut history = TrainingHistory {
        epoch_loss: Vec::with_capacity(config.epochs),
        epoch_seconds: Vec::with_capacity(config.epochs),
        params_checksum: 0,
    };
    let mut indices: Vec<usize> = (0..dataset.len()).collect();

    for epoch in 0..config.epochs {
        let started = Instant::now();
        rng.shuffle(&mut indices);
        let mut loss_sum = 0.0;
        let mut points_seen = 0usize;
        for chunk in indices.chunks(config.batch_size) {
            let mut batch: Vec<usize> = chunk.to_vec();
            let mut tries = 0;
            let batch_loss = loop {
                grad_pot.iter_mut().for_each(|g| *g = 0.0);
                grad_wave.iter_mut().for_each(|g| *g = 0.0);
                let result = match &model {
                    Model::Single(net) => {
                        objective.grad_indexed(&batch, net, None, &mut grad_pot, None)
                    }
                    Model::PibPair { potential, wave } => objective.grad_indexed(
                        &batch,
                        potential,
                        Some(wave),
                        &mut grad_pot,
                        Some(&mut grad_wave),
                    ),
                };
                match result {
                    Ok(l) => break l,
                    Err(Error::NodalPoint(_)) => {
                        tries += 1;
                        if tries > 100 {
                            return Err(Error::Sampling(
                                "batch resampling exhausted near a moving node".into(),
                            ));
                        }
                        for b in batch.iter_mut() {
                            *b = rng.below(dataset.len());
                        }
                    }
                    Err(e) => return Err(e),
                }
            };
            if !batch_loss.is_finite() {
                return Err(Error::Divergence { epoch });
            }
            match &mut model {
                Model::Single(net) => adam_pot.step(&mut net.params, &grad_pot),
                Model::PibPair { potential, wave } => {
                    adam_pot.step(&mut potential.params, &grad_pot);
                    adam_wave.step(&mut wave.params, &grad_wave);
                }
            }
            loss_sum += batch_loss * batch.len() as f64;
            points_seen += batch.len();
        }
        history.epoch_loss.push(loss_sum / points_seen as f64);
        history.epoch_seconds.push(started.elapsed().as_secs_f64());
    }
    history.params_checksum = model.checksum();
    Ok((model, history))
}
