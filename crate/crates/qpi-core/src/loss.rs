//! Residual loss functions mapping (potential model, sample batch, system)
//! to a scalar, with exact parameter gradients via reverse accumulation
//! through the jet-valued forward passes.
//!
//! Everything about a batch that does not depend on the model — kinetic
//! ratio derivatives, time-dependent targets, phase-space field partials —
//! is precomputed into per-point terms once ([`Objective::prepare`]), so
//! training steps touch only the network.

use crate::catalog::wigner::{HarmonicWignerField, PtWignerField, WignerField};
use crate::catalog::{SystemKind, SystemSpec, NODAL_EPSILON};
use crate::error::{Error, Result};
use crate::jet::{Dual2D, Jet3};
use crate::net::{FinalActivation, Mlp, MlpConfig};
use crate::parallel;
use crate::potential::PotentialFn;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    /// Stationary residual: derivative of (kinetic ratio + potential).
    Tise,
    /// Time-dependent residual against the complex-wave target.
    Tdse,
    /// Truncated phase-space evolution residual, order k in {0, 1}.
    WignerMoyal { k: u8 },
    /// Two-network box loss: supervised wave fit plus the stationary
    /// residual computed from the learned wave's own jet.
    SupervisedPib,
}

/// Reading of the series coefficient `1/(2s+1)!`. The alternative linear
/// reading `1/(2s+1)` is selectable for comparison; both agree at s = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MoyalDenominator {
    #[default]
    Factorial,
    Linear,
}

/// Sign of the s = 1 term's `(-ħ²)` prefactor, selectable for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MoyalS1Sign {
    #[default]
    Negative,
    Positive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialCondition {
    pub point: Vec<f64>,
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossSpec {
    pub kind: LossKind,
    pub initial_condition: Option<InitialCondition>,
    pub ic_weight: f64,
    pub moyal_denominator: MoyalDenominator,
    pub moyal_s1_sign: MoyalS1Sign,
}

impl LossSpec {
    pub fn new(kind: LossKind) -> Self {
        LossSpec {
            kind,
            initial_condition: None,
            ic_weight: 1.0,
            moyal_denominator: MoyalDenominator::default(),
            moyal_s1_sign: MoyalS1Sign::default(),
        }
    }

    pub fn with_ic(mut self, point: Vec<f64>, target: f64) -> Self {
        self.initial_condition = Some(InitialCondition { point, target });
        self
    }

    pub fn validate(&self, net: &MlpConfig) -> Result<()> {
        if let LossKind::WignerMoyal { k } = self.kind {
            if k > 1 {
                return Err(Error::Config(format!(
                    "truncation order k must be 0 or 1, got {k}"
                )));
            }
        }
        if self.kind == LossKind::Tise
            && self.initial_condition.is_none()
            && net.final_activation == FinalActivation::None
        {
            return Err(Error::Config(
                "stationary loss with an unbounded output needs an initial condition \
                 to pin the potential's additive constant"
                    .into(),
            ));
        }
        if !self.ic_weight.is_finite() || self.ic_weight < 0.0 {
            return Err(Error::Config(format!(
                "bad initial-condition weight {}",
                self.ic_weight
            )));
        }
        Ok(())
    }
}

/// A batch of sample coordinates: up to three coordinates per point, with
/// `dim` of them meaningful.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    points: Vec<[f64; 3]>,
    dim: usize,
}

impl SampleBatch {
    pub fn new(dim: usize) -> Self {
        assert!((1..=3).contains(&dim));
        SampleBatch {
            points: Vec::new(),
            dim,
        }
    }

    pub fn push(&mut self, coords: &[f64]) {
        debug_assert_eq!(coords.len(), self.dim);
        let mut p = [0.0; 3];
        p[..coords.len()].copy_from_slice(coords);
        self.points.push(p);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i][..self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.points.iter().map(move |p| &p[..self.dim])
    }
}

/// Model-independent data for one sample point.
#[derive(Debug, Clone, Copy)]
enum PointTerm {
    Tise1 {
        x: f64,
        dk: f64,
    },
    Tise2 {
        x: f64,
        y: f64,
        dkx: f64,
        dky: f64,
    },
    Tdse {
        x: f64,
        t: f64,
        target: f64,
    },
    Wigner {
        x: f64,
        advect: f64,
        w_p: f64,
        w_p3: f64,
    },
    Pib {
        x: f64,
        psi: f64,
    },
}

/// A loss bound to a batch: per-point terms precomputed, ready for repeated
/// evaluation against candidate models.
pub struct Objective {
    pub loss: LossSpec,
    terms: Vec<PointTerm>,
    /// `[s0, s1]` series coefficients of the phase-space residual.
    moyal: [f64; 2],
    hbar2_over_2m: f64,
}

impl Objective {
    pub fn prepare(loss: &LossSpec, spec: &SystemSpec, batch: &SampleBatch) -> Result<Objective> {
        if batch.is_empty() {
            return Err(Error::Config("empty sample batch".into()));
        }
        let c = spec.constants;
        let terms = match loss.kind {
            LossKind::Tise => {
                if !spec.has_amplitude() || spec.kind == SystemKind::Soliton {
                    return Err(Error::Config(format!(
                        "{} is not a stationary amplitude system",
                        spec.id()
                    )));
                }
                let idx: Vec<usize> = (0..batch.len()).collect();
                parallel::try_map(&idx, |&i| {
                    let p = batch.point(i);
                    let (_, dk) = spec.kinetic_ratio_grad(p)?;
                    Ok(if batch.dim() == 2 {
                        PointTerm::Tise2 {
                            x: p[0],
                            y: p[1],
                            dkx: dk[0],
                            dky: dk[1],
                        }
                    } else {
                        PointTerm::Tise1 { x: p[0], dk: dk[0] }
                    })
                })?
            }
            LossKind::Tdse => {
                if spec.kind != SystemKind::Soliton {
                    return Err(Error::Config(format!(
                        "time-dependent loss is defined for the soliton system, got {}",
                        spec.id()
                    )));
                }
                let idx: Vec<usize> = (0..batch.len()).collect();
                parallel::try_map(&idx, |&i| {
                    let p = batch.point(i);
                    let target = crate::catalog::soliton_tdse_target(p[0], p[1])?;
                    Ok(PointTerm::Tdse {
                        x: p[0],
                        t: p[1],
                        target,
                    })
                })?
            }
            LossKind::WignerMoyal { k } => match spec.kind {
                SystemKind::WignerHo => wigner_terms(&HarmonicWignerField, k, c.mass, batch)?,
                SystemKind::WignerPt => {
                    wigner_terms(&PtWignerField::with_default_rule(), k, c.mass, batch)?
                }
                _ => {
                    return Err(Error::Config(format!(
                        "{} has no catalog phase-space distribution",
                        spec.id()
                    )))
                }
            },
            LossKind::SupervisedPib => {
                let pib = spec.pib()?;
                batch
                    .iter()
                    .map(|p| {
                        Ok(PointTerm::Pib {
                            x: p[0],
                            psi: pib.psi(p[0]),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };
        Ok(Objective {
            loss: loss.clone(),
            terms,
            moyal: moyal_coefficients(loss, c.hbar),
            hbar2_over_2m: 0.5 * c.hbar * c.hbar / c.mass,
        })
    }

    /// Bind a caller-supplied phase-space field instead of the catalog one.
    pub fn prepare_wigner(
        loss: &LossSpec,
        field: &dyn WignerField,
        mass: f64,
        hbar: f64,
        batch: &SampleBatch,
    ) -> Result<Objective> {
        let k = match loss.kind {
            LossKind::WignerMoyal { k } => k,
            _ => return Err(Error::Config("not a phase-space loss".into())),
        };
        Ok(Objective {
            loss: loss.clone(),
            terms: wigner_terms(field, k, mass, batch)?,
            moyal: moyal_coefficients(loss, hbar),
            hbar2_over_2m: 0.5 * hbar * hbar / mass,
        })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn ic_value(&self, potential: &dyn PotentialFn) -> Result<f64> {
        match &self.loss.initial_condition {
            None => Ok(0.0),
            Some(ic) => {
                let d = potential.value(&ic.point)? - ic.target;
                Ok(self.loss.ic_weight * d * d)
            }
        }
    }

    fn point_value(
        &self,
        term: &PointTerm,
        potential: &dyn PotentialFn,
        wave: Option<&dyn PotentialFn>,
    ) -> Result<f64> {
        match *term {
            PointTerm::Tise1 { x, dk } => {
                let r = dk + potential.jet1d(x)?.c1;
                Ok(r * r)
            }
            PointTerm::Tise2 { x, y, dkx, dky } => {
                let d = potential.dual2(x, y)?;
                let (rx, ry) = (dkx + d.dx, dky + d.dy);
                Ok(rx * rx + ry * ry)
            }
            PointTerm::Tdse { x, t, target } => {
                let r = potential.value(&[x, t])? - target;
                Ok(r * r)
            }
            PointTerm::Wigner {
                x,
                advect,
                w_p,
                w_p3,
            } => {
                let j = potential.jet1d(x)?;
                let r = advect - self.moyal[0] * j.c1 * w_p - self.moyal[1] * j.c3 * w_p3;
                Ok(r * r)
            }
            PointTerm::Pib { x, psi } => {
                let wave =
                    wave.ok_or_else(|| Error::Config("box loss needs the wave network".into()))?;
                let w = wave.jet1d(x)?;
                if w.c0.abs() < NODAL_EPSILON {
                    return Err(Error::NodalPoint(vec![x]));
                }
                let sup = w.c0 - psi;
                let dkw = -self.hbar2_over_2m * (w.c3 * w.c0 - w.c2 * w.c1) / (w.c0 * w.c0);
                let r = dkw + potential.jet1d(x)?.c1;
                Ok(sup * sup + r * r)
            }
        }
    }

    /// Mean point loss over the selected term indices, plus the
    /// initial-condition penalty.
    pub fn value_indexed(
        &self,
        idx: &[usize],
        potential: &dyn PotentialFn,
        wave: Option<&dyn PotentialFn>,
    ) -> Result<f64> {
        if idx.is_empty() {
            return Err(Error::Config("empty index set".into()));
        }
        let selected: Vec<&PointTerm> = idx.iter().map(|&i| &self.terms[i]).collect();
        let values = parallel::try_map(&selected, |t| self.point_value(t, potential, wave))?;
        Ok(parallel::pairwise_sum(&values) / values.len() as f64 + self.ic_value(potential)?)
    }

    pub fn value(
        &self,
        potential: &dyn PotentialFn,
        wave: Option<&dyn PotentialFn>,
    ) -> Result<f64> {
        let idx: Vec<usize> = (0..self.len()).collect();
        self.value_indexed(&idx, potential, wave)
    }

    /// Loss and exact parameter gradients over the selected term indices.
    /// The wave gradient buffer is required exactly when the loss couples a
    /// second network.
    pub fn grad_indexed(
        &self,
        idx: &[usize],
        potential: &Mlp,
        wave: Option<&Mlp>,
        grad_potential: &mut [f64],
        mut grad_wave: Option<&mut [f64]>,
    ) -> Result<f64> {
        if idx.is_empty() {
            return Err(Error::Config("empty index set".into()));
        }
        let n_pot = potential.n_params();
        let n_wave = wave.map(|w| w.n_params()).unwrap_or(0);
        let inv_n = 1.0 / idx.len() as f64;
        let selected: Vec<&PointTerm> = idx.iter().map(|&i| &self.terms[i]).collect();

        let per_item = |term: &&PointTerm, grad: &mut [f64]| -> Result<f64> {
            let (gp, gw) = grad.split_at_mut(n_pot);
            match **term {
                PointTerm::Tise1 { x, dk } => {
                    let pb = potential.traced_jet(Jet3::variable(x))?;
                    let r = dk + pb.output().c1;
                    pb.accumulate(Jet3::new(0.0, 2.0 * r * inv_n, 0.0, 0.0), gp);
                    Ok(r * r)
                }
                PointTerm::Tise2 { x, y, dkx, dky } => {
                    let pb = potential.traced_dual2(Dual2D::var_x(x), Dual2D::var_y(y))?;
                    let d = pb.output();
                    let (rx, ry) = (dkx + d.dx, dky + d.dy);
                    pb.accumulate(Dual2D::new(0.0, 2.0 * rx * inv_n, 2.0 * ry * inv_n), gp);
                    Ok(rx * rx + ry * ry)
                }
                PointTerm::Tdse { x, t, target } => {
                    let pb = potential.traced_scalar(&[x, t])?;
                    let r = pb.output() - target;
                    pb.accumulate(2.0 * r * inv_n, gp);
                    Ok(r * r)
                }
                PointTerm::Wigner {
                    x,
                    advect,
                    w_p,
                    w_p3,
                } => {
                    let pb = potential.traced_jet(Jet3::variable(x))?;
                    let j = pb.output();
                    let r = advect - self.moyal[0] * j.c1 * w_p - self.moyal[1] * j.c3 * w_p3;
                    pb.accumulate(
                        Jet3::new(
                            0.0,
                            -2.0 * r * self.moyal[0] * w_p * inv_n,
                            0.0,
                            -2.0 * r * self.moyal[1] * w_p3 * inv_n,
                        ),
                        gp,
                    );
                    Ok(r * r)
                }
                PointTerm::Pib { x, psi } => {
                    let wave_net = wave
                        .ok_or_else(|| Error::Config("box loss needs the wave network".into()))?;
                    let wb = wave_net.traced_jet(Jet3::variable(x))?;
                    let w = wb.output();
                    if w.c0.abs() < NODAL_EPSILON {
                        return Err(Error::NodalPoint(vec![x]));
                    }
                    let pb = potential.traced_jet(Jet3::variable(x))?;
                    let sup = w.c0 - psi;
                    let s = -self.hbar2_over_2m;
                    let a = w.c3 * w.c0 - w.c2 * w.c1;
                    let w0sq = w.c0 * w.c0;
                    let dkw = s * a / w0sq;
                    let r = dkw + pb.output().c1;
                    pb.accumulate(Jet3::new(0.0, 2.0 * r * inv_n, 0.0, 0.0), gp);
                    // d(dkw)/d(w jet) from the quotient rule
                    let two_r = 2.0 * r * inv_n * s;
                    let adj_w = Jet3::new(
                        2.0 * sup * inv_n + two_r * (w.c3 / w0sq - 2.0 * a / (w0sq * w.c0)),
                        two_r * (-w.c2 / w0sq),
                        two_r * (-w.c1 / w0sq),
                        two_r / w.c0,
                    );
                    wb.accumulate(adj_w, gw);
                    Ok(sup * sup + r * r)
                }
            }
        };

        let (values, combined) = parallel::accumulate_grads(&selected, n_pot + n_wave, per_item)?;
        for (acc, g) in grad_potential.iter_mut().zip(combined[..n_pot].iter()) {
            *acc += g;
        }
        if let Some(gw) = grad_wave.take() {
            for (acc, g) in gw.iter_mut().zip(combined[n_pot..].iter()) {
                *acc += g;
            }
        }

        let mut total = parallel::pairwise_sum(&values) / values.len() as f64;
        if let Some(ic) = &self.loss.initial_condition {
            let pb = potential.traced_scalar(&ic.point)?;
            let d = pb.output() - ic.target;
            pb.accumulate(2.0 * self.loss.ic_weight * d, grad_potential);
            total += self.loss.ic_weight * d * d;
        }
        Ok(total)
    }
}

fn moyal_coefficients(loss: &LossSpec, hbar: f64) -> [f64; 2] {
    let k = match loss.kind {
        LossKind::WignerMoyal { k } => k,
        _ => return [1.0, 0.0],
    };
    if k == 0 {
        return [1.0, 0.0];
    }
    let denom = match loss.moyal_denominator {
        MoyalDenominator::Factorial => 6.0, // (2s+1)! at s = 1
        MoyalDenominator::Linear => 3.0,    // 2s+1 at s = 1
    };
    let sign = match loss.moyal_s1_sign {
        MoyalS1Sign::Negative => -1.0,
        MoyalS1Sign::Positive => 1.0,
    };
    [1.0, sign * hbar * hbar * 0.25 / denom]
}

fn wigner_terms(
    field: &dyn WignerField,
    k: u8,
    mass: f64,
    batch: &SampleBatch,
) -> Result<Vec<PointTerm>> {
    if batch.dim() != 3 {
        return Err(Error::Config(
            "phase-space batches carry (x, p, t) coordinates".into(),
        ));
    }
    let idx: Vec<usize> = (0..batch.len()).collect();
    parallel::try_map(&idx, |&i| {
        let pt = batch.point(i);
        let (x, p, t) = (pt[0], pt[1], pt[2]);
        let d = field.derivs(x, p, t, k == 1)?;
        Ok(PointTerm::Wigner {
            x,
            advect: d.w_t + p / mass * d.w_x,
            w_p: d.w_p,
            w_p3: d.w_p3,
        })
    })
}

// ── spec-level convenience wrappers ─────────────────────────────────────

/// Stationary residual loss of a potential model over a batch.
pub fn tise_loss(
    potential: &dyn PotentialFn,
    spec: &SystemSpec,
    batch: &SampleBatch,
    loss: &LossSpec,
) -> Result<f64> {
    Objective::prepare(loss, spec, batch)?.value(potential, None)
}

/// Time-dependent residual loss for the soliton wave.
pub fn tdse_loss(
    potential: &dyn PotentialFn,
    spec: &SystemSpec,
    batch: &SampleBatch,
    loss: &LossSpec,
) -> Result<f64> {
    Objective::prepare(loss, spec, batch)?.value(potential, None)
}

/// Truncated phase-space evolution loss against a caller-supplied field.
pub fn wigner_moyal_loss(
    potential: &dyn PotentialFn,
    field: &dyn WignerField,
    batch: &SampleBatch,
    loss: &LossSpec,
) -> Result<f64> {
    Objective::prepare_wigner(loss, field, 1.0, 1.0, batch)?.value(potential, None)
}

/// Supervised wave fit plus stationary residual for the perturbed box.
pub fn supervised_pib_loss(
    potential: &dyn PotentialFn,
    wave: &dyn PotentialFn,
    spec: &SystemSpec,
    batch: &SampleBatch,
    loss: &LossSpec,
) -> Result<f64> {
    Objective::prepare(loss, spec, batch)?.value(potential, Some(wave))
}
