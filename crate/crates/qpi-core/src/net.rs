//! Fixed-architecture potential network with jet-valued forward passes and
//! exact parameter gradients.
//!
//! The network is four affine layers with hidden widths 32, 128, 128 and a
//! residual connection between the second and third hidden blocks. The
//! hidden nonlinearity is tanh (the third-order jet path needs three
//! continuous derivatives, which rules out piecewise-linear choices). The
//! final layer optionally applies a sigmoid and a constant output scale to
//! bound the learned potential.
//!
//! Every forward pass is generic over a scalar carrier: plain `f64`,
//! [`Jet3`] (value plus three input derivatives), or [`Dual2D`] (value plus
//! two first partials). Reverse accumulation propagates adjoints of the
//! carrier components through the same computation, so gradients of any
//! scalar functional of the outputs — including functionals of the
//! derivative components — are exact.

use std::path::Path;

use crate::error::{Error, Result};
use crate::jet::{Dual2D, Jet3};
use crate::potential::PotentialFn;
use crate::rng::Rng;

pub const HIDDEN: [usize; 3] = [32, 128, 128];

/// Scalar carrier for the generic forward/backward passes.
pub trait JetScalar: Copy + Send + Sync {
    fn constant(c: f64) -> Self;
    fn scale(self, s: f64) -> Self;
    fn add(self, o: Self) -> Self;
    /// `acc + self * w`.
    fn mul_add(self, w: f64, acc: Self) -> Self;
    /// Leading (value) component.
    fn val(self) -> f64;
    /// Component-wise dot product, used for weight gradients.
    fn dot(self, o: Self) -> f64;
    fn tanh_act(self) -> Self;
    /// Vector-Jacobian product of `tanh_act` at pre-activation `z` whose
    /// tanh value is `t0`.
    fn tanh_vjp(z: Self, t0: f64, adj: Self) -> Self;
    fn sigmoid_act(self) -> Self;
    fn sigmoid_vjp(z: Self, s0: f64, adj: Self) -> Self;
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl JetScalar for f64 {
    fn constant(c: f64) -> Self {
        c
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn mul_add(self, w: f64, acc: Self) -> Self {
        acc + self * w
    }
    fn val(self) -> f64 {
        self
    }
    fn dot(self, o: Self) -> f64 {
        self * o
    }
    fn tanh_act(self) -> Self {
        self.tanh()
    }
    fn tanh_vjp(_z: Self, t0: f64, adj: Self) -> Self {
        (1.0 - t0 * t0) * adj
    }
    fn sigmoid_act(self) -> Self {
        sigmoid(self)
    }
    fn sigmoid_vjp(_z: Self, s0: f64, adj: Self) -> Self {
        s0 * (1.0 - s0) * adj
    }
}

impl JetScalar for Jet3 {
    fn constant(c: f64) -> Self {
        Jet3::constant(c)
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn mul_add(self, w: f64, acc: Self) -> Self {
        Jet3::new(
            acc.c0 + self.c0 * w,
            acc.c1 + self.c1 * w,
            acc.c2 + self.c2 * w,
            acc.c3 + self.c3 * w,
        )
    }
    fn val(self) -> f64 {
        self.c0
    }
    fn dot(self, o: Self) -> f64 {
        self.c0 * o.c0 + self.c1 * o.c1 + self.c2 * o.c2 + self.c3 * o.c3
    }
    fn tanh_act(self) -> Self {
        self.tanh()
    }
    fn tanh_vjp(z: Self, t0: f64, adj: Self) -> Self {
        let t = t0;
        let s = 1.0 - t * t;
        let d1 = s;
        let d2 = -2.0 * t * s;
        let d3 = s * (6.0 * t * t - 2.0);
        let d4 = 8.0 * t * s * (2.0 - 3.0 * t * t);
        jet_act_vjp(z, adj, d1, d2, d3, d4)
    }
    fn sigmoid_act(self) -> Self {
        let s = sigmoid(self.c0);
        let s1 = s * (1.0 - s);
        self.compose([
            s,
            s1,
            s1 * (1.0 - 2.0 * s),
            s1 * (1.0 - 6.0 * s + 6.0 * s * s),
        ])
    }
    fn sigmoid_vjp(z: Self, s0: f64, adj: Self) -> Self {
        let s = s0;
        let d1 = s * (1.0 - s);
        let d2 = d1 * (1.0 - 2.0 * s);
        let d3 = d1 * (1.0 - 6.0 * s + 6.0 * s * s);
        let d4 = d1 * (1.0 - 14.0 * s + 36.0 * s * s - 24.0 * s * s * s);
        jet_act_vjp(z, adj, d1, d2, d3, d4)
    }
}

/// Transposed Jacobian of the order-3 composition rule for an elementwise
/// activation with derivative values `d1..d4` at `z.c0`.
fn jet_act_vjp(z: Jet3, adj: Jet3, d1: f64, d2: f64, d3: f64, d4: f64) -> Jet3 {
    let (z1, z2, z3) = (z.c1, z.c2, z.c3);
    Jet3 {
        c0: d1 * adj.c0
            + d2 * z1 * adj.c1
            + (d2 * z2 + d3 * z1 * z1) * adj.c2
            + (d2 * z3 + 3.0 * d3 * z1 * z2 + d4 * z1 * z1 * z1) * adj.c3,
        c1: d1 * adj.c1 + 2.0 * d2 * z1 * adj.c2 + (3.0 * d2 * z2 + 3.0 * d3 * z1 * z1) * adj.c3,
        c2: d1 * adj.c2 + 3.0 * d2 * z1 * adj.c3,
        c3: d1 * adj.c3,
    }
}

impl JetScalar for Dual2D {
    fn constant(c: f64) -> Self {
        Dual2D::constant(c)
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn mul_add(self, w: f64, acc: Self) -> Self {
        Dual2D::new(
            acc.v + self.v * w,
            acc.dx + self.dx * w,
            acc.dy + self.dy * w,
        )
    }
    fn val(self) -> f64 {
        self.v
    }
    fn dot(self, o: Self) -> f64 {
        self.v * o.v + self.dx * o.dx + self.dy * o.dy
    }
    fn tanh_act(self) -> Self {
        self.tanh()
    }
    fn tanh_vjp(z: Self, t0: f64, adj: Self) -> Self {
        let d1 = 1.0 - t0 * t0;
        let d2 = -2.0 * t0 * d1;
        Dual2D {
            v: d1 * adj.v + d2 * (z.dx * adj.dx + z.dy * adj.dy),
            dx: d1 * adj.dx,
            dy: d1 * adj.dy,
        }
    }
    fn sigmoid_act(self) -> Self {
        let s = sigmoid(self.v);
        self.compose([s, s * (1.0 - s)])
    }
    fn sigmoid_vjp(z: Self, s0: f64, adj: Self) -> Self {
        let d1 = s0 * (1.0 - s0);
        let d2 = d1 * (1.0 - 2.0 * s0);
        Dual2D {
            v: d1 * adj.v + d2 * (z.dx * adj.dx + z.dy * adj.dy),
            dx: d1 * adj.dx,
            dy: d1 * adj.dy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FinalActivation {
    None,
    Sigmoid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpConfig {
    pub input_dim: usize,
    pub final_activation: FinalActivation,
    pub final_scale: Option<f64>,
    pub residual_skip: bool,
}

impl MlpConfig {
    pub fn new(input_dim: usize) -> Self {
        MlpConfig {
            input_dim,
            final_activation: FinalActivation::None,
            final_scale: None,
            residual_skip: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 || self.input_dim > 2 {
            return Err(Error::Config(format!(
                "input dimension must be 1 or 2, got {}",
                self.input_dim
            )));
        }
        if let Some(s) = self.final_scale {
            if !s.is_finite() || s == 0.0 {
                return Err(Error::Config(format!("bad final scale {s}")));
            }
        }
        Ok(())
    }

    /// Per-layer `(fan_in, fan_out)`.
    fn shapes(&self) -> [(usize, usize); 4] {
        [
            (self.input_dim, HIDDEN[0]),
            (HIDDEN[0], HIDDEN[1]),
            (HIDDEN[1], HIDDEN[2]),
            (HIDDEN[2], 1),
        ]
    }

    pub fn n_params(&self) -> usize {
        self.shapes().iter().map(|(i, o)| i * o + o).sum()
    }

    /// Start offsets of `[w1, b1, w2, b2, w3, b3, w4, b4]` in the flat
    /// parameter vector.
    fn offsets(&self) -> [usize; 8] {
        let mut off = [0usize; 8];
        let mut pos = 0;
        for (l, (fan_in, fan_out)) in self.shapes().iter().enumerate() {
            off[2 * l] = pos;
            pos += fan_in * fan_out;
            off[2 * l + 1] = pos;
            pos += fan_out;
        }
        off
    }
}

/// The potential network: hyperparameters plus the flat parameter vector
/// (row-major weights, then biases, per layer).
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    pub config: MlpConfig,
    pub params: Vec<f64>,
}

struct Trace<T> {
    input: Vec<T>,
    z1: Vec<T>,
    a1: Vec<T>,
    z2: Vec<T>,
    a2: Vec<T>,
    z3: Vec<T>,
    t3: Vec<T>,
    a3: Vec<T>,
    z4: T,
    out: T,
    final_act_val: f64,
}

/// A recorded forward pass; [`Pullback::accumulate`] adds `dL/dθ` into a
/// gradient buffer given the adjoint of the output carrier.
pub struct Pullback<'m, T: JetScalar> {
    net: &'m Mlp,
    trace: Trace<T>,
}

impl<T: JetScalar> Pullback<'_, T> {
    pub fn output(&self) -> T {
        self.trace.out
    }

    pub fn accumulate(&self, adj_out: T, grad: &mut [f64]) {
        self.net.backward(&self.trace, adj_out, grad);
    }
}

impl Mlp {
    /// Seeded initialization: weights uniform in
    /// `±sqrt(6/(fan_in+fan_out))`, biases uniform in `±1/sqrt(fan_in)`.
    /// Bit-reproducible for a given seed.
    ///
    /// Nonzero bias draws matter here: with zero biases every first-layer
    /// feature is an odd function of the input, a degenerate basis for even
    /// targets that lets a bounded output head saturate over half the
    /// domain and stall.
    pub fn init(config: MlpConfig, seed: u64) -> Result<Mlp> {
        config.validate()?;
        let mut rng = Rng::new(seed);
        let mut params = vec![0.0; config.n_params()];
        let off = config.offsets();
        for (l, (fan_in, fan_out)) in config.shapes().iter().enumerate() {
            let w_bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            for w in params[off[2 * l]..off[2 * l] + fan_in * fan_out].iter_mut() {
                *w = rng.range(-w_bound, w_bound);
            }
            let b_bound = 1.0 / (*fan_in as f64).sqrt();
            for b in params[off[2 * l + 1]..off[2 * l + 1] + fan_out].iter_mut() {
                *b = rng.range(-b_bound, b_bound);
            }
        }
        Ok(Mlp { config, params })
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    fn check_input(&self, dim: usize) -> Result<()> {
        if dim != self.config.input_dim {
            return Err(Error::Config(format!(
                "network expects input dimension {}, got {dim}",
                self.config.input_dim
            )));
        }
        Ok(())
    }

    fn affine<T: JetScalar>(
        &self,
        w_off: usize,
        b_off: usize,
        n_out: usize,
        input: &[T],
        out: &mut Vec<T>,
    ) {
        let n_in = input.len();
        for i in 0..n_out {
            let row = &self.params[w_off + i * n_in..w_off + (i + 1) * n_in];
            let mut acc = T::constant(self.params[b_off + i]);
            for (x, &w) in input.iter().zip(row.iter()) {
                acc = x.mul_add(w, acc);
            }
            out.push(acc);
        }
    }

    fn run<T: JetScalar>(&self, input: Vec<T>) -> Trace<T> {
        let off = self.config.offsets();
        let mut z1 = Vec::with_capacity(HIDDEN[0]);
        self.affine(off[0], off[1], HIDDEN[0], &input, &mut z1);
        let a1: Vec<T> = z1.iter().map(|z| z.tanh_act()).collect();
        let mut z2 = Vec::with_capacity(HIDDEN[1]);
        self.affine(off[2], off[3], HIDDEN[1], &a1, &mut z2);
        let a2: Vec<T> = z2.iter().map(|z| z.tanh_act()).collect();
        let mut z3 = Vec::with_capacity(HIDDEN[2]);
        self.affine(off[4], off[5], HIDDEN[2], &a2, &mut z3);
        let t3: Vec<T> = z3.iter().map(|z| z.tanh_act()).collect();
        let a3: Vec<T> = if self.config.residual_skip {
            t3.iter().zip(a2.iter()).map(|(t, a)| t.add(*a)).collect()
        } else {
            t3.clone()
        };
        let mut z4v = Vec::with_capacity(1);
        self.affine(off[6], off[7], 1, &a3, &mut z4v);
        let z4 = z4v[0];
        let scale = self.config.final_scale.unwrap_or(1.0);
        let (out, final_act_val) = match self.config.final_activation {
            FinalActivation::None => (z4.scale(scale), 0.0),
            FinalActivation::Sigmoid => {
                let s = z4.sigmoid_act();
                (s.scale(scale), s.val())
            }
        };
        Trace {
            input,
            z1,
            a1,
            z2,
            a2,
            z3,
            t3,
            a3,
            z4,
            out,
            final_act_val,
        }
    }

    fn backward<T: JetScalar>(&self, tr: &Trace<T>, adj_out: T, grad: &mut [f64]) {
        let off = self.config.offsets();
        let scale = self.config.final_scale.unwrap_or(1.0);
        let adj_z4 = match self.config.final_activation {
            FinalActivation::None => adj_out.scale(scale),
            FinalActivation::Sigmoid => {
                T::sigmoid_vjp(tr.z4, tr.final_act_val, adj_out.scale(scale))
            }
        };

        // Layer 4
        grad[off[7]] += adj_z4.val();
        let w4 = off[6];
        let mut adj_a3: Vec<T> = Vec::with_capacity(HIDDEN[2]);
        for j in 0..HIDDEN[2] {
            grad[w4 + j] += adj_z4.dot(tr.a3[j]);
            adj_a3.push(adj_z4.scale(self.params[w4 + j]));
        }

        // Residual block: a3 = tanh(z3) [+ a2]
        let mut adj_a2: Vec<T> = if self.config.residual_skip {
            adj_a3.clone()
        } else {
            vec![T::constant(0.0); HIDDEN[1]]
        };
        let w3 = off[4];
        for i in 0..HIDDEN[2] {
            let adj_z3 = T::tanh_vjp(tr.z3[i], tr.t3[i].val(), adj_a3[i]);
            grad[off[5] + i] += adj_z3.val();
            let row = w3 + i * HIDDEN[1];
            for j in 0..HIDDEN[1] {
                grad[row + j] += adj_z3.dot(tr.a2[j]);
                adj_a2[j] = adj_z3.mul_add(self.params[row + j], adj_a2[j]);
            }
        }

        // Layer 2
        let w2 = off[2];
        let mut adj_a1: Vec<T> = vec![T::constant(0.0); HIDDEN[0]];
        for i in 0..HIDDEN[1] {
            let adj_z2 = T::tanh_vjp(tr.z2[i], tr.a2[i].val(), adj_a2[i]);
            grad[off[3] + i] += adj_z2.val();
            let row = w2 + i * HIDDEN[0];
            for j in 0..HIDDEN[0] {
                grad[row + j] += adj_z2.dot(tr.a1[j]);
                adj_a1[j] = adj_z2.mul_add(self.params[row + j], adj_a1[j]);
            }
        }

        // Layer 1
        let w1 = off[0];
        let n_in = self.config.input_dim;
        for i in 0..HIDDEN[0] {
            let adj_z1 = T::tanh_vjp(tr.z1[i], tr.a1[i].val(), adj_a1[i]);
            grad[off[1] + i] += adj_z1.val();
            let row = w1 + i * n_in;
            for j in 0..n_in {
                grad[row + j] += adj_z1.dot(tr.input[j]);
            }
        }
    }

    pub fn forward(&self, point: &[f64]) -> Result<f64> {
        self.check_input(point.len())?;
        Ok(self.run(point.to_vec()).out)
    }

    /// Jet of the scalar-input network at the seed point: output carries
    /// the potential value and its first three input derivatives.
    pub fn forward_jet(&self, seed: Jet3) -> Result<Jet3> {
        self.check_input(1)?;
        Ok(self.run(vec![seed]).out)
    }

    /// Two-input forward with first-order partials.
    pub fn forward_dual2(&self, x: Dual2D, y: Dual2D) -> Result<Dual2D> {
        self.check_input(2)?;
        Ok(self.run(vec![x, y]).out)
    }

    pub fn traced_scalar(&self, point: &[f64]) -> Result<Pullback<'_, f64>> {
        self.check_input(point.len())?;
        Ok(Pullback {
            net: self,
            trace: self.run(point.to_vec()),
        })
    }

    pub fn traced_jet(&self, seed: Jet3) -> Result<Pullback<'_, Jet3>> {
        self.check_input(1)?;
        Ok(Pullback {
            net: self,
            trace: self.run(vec![seed]),
        })
    }

    pub fn traced_dual2(&self, x: Dual2D, y: Dual2D) -> Result<Pullback<'_, Dual2D>> {
        self.check_input(2)?;
        Ok(Pullback {
            net: self,
            trace: self.run(vec![x, y]),
        })
    }

    /// FNV-1a over the little-endian parameter bytes.
    pub fn params_checksum(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for p in &self.params {
            for b in p.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x1000_0000_01b3);
            }
        }
        h
    }

    // ── checkpoint format (version 1) ───────────────────────────────────
    // magic "QPIC" | u32 version | u32 input_dim | 3×u32 hidden widths |
    // u8 residual | u8 hidden activation (0 = tanh) | u8 final activation
    // (0 = none, 1 = sigmoid) | u8 has_scale | f64 scale | u64 param count |
    // params as little-endian f64.

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(44 + 8 * self.params.len());
        buf.extend_from_slice(b"QPIC");
        buf.extend_from_slice(&1u32.to_le_bytes());
        buf.extend_from_slice(&(self.config.input_dim as u32).to_le_bytes());
        for h in HIDDEN {
            buf.extend_from_slice(&(h as u32).to_le_bytes());
        }
        buf.push(self.config.residual_skip as u8);
        buf.push(0u8);
        buf.push(match self.config.final_activation {
            FinalActivation::None => 0,
            FinalActivation::Sigmoid => 1,
        });
        buf.push(self.config.final_scale.is_some() as u8);
        buf.extend_from_slice(&self.config.final_scale.unwrap_or(0.0).to_le_bytes());
        buf.extend_from_slice(&(self.params.len() as u64).to_le_bytes());
        for p in &self.params {
            buf.extend_from_slice(&p.to_le_bytes());
        }
        buf
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Mlp> {
        let bad = |msg: &str| Error::Config(format!("checkpoint: {msg}"));
        if bytes.len() < 44 {
            return Err(bad("truncated header"));
        }
        if &bytes[0..4] != b"QPIC" {
            return Err(bad("bad magic"));
        }
        let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
        if u32_at(4) != 1 {
            return Err(bad("unsupported version"));
        }
        let input_dim = u32_at(8) as usize;
        for (k, h) in HIDDEN.iter().enumerate() {
            if u32_at(12 + 4 * k) as usize != *h {
                return Err(bad("hidden widths do not match this build"));
            }
        }
        let residual_skip = bytes[24] != 0;
        if bytes[25] != 0 {
            return Err(bad("unknown hidden activation"));
        }
        let final_activation = match bytes[26] {
            0 => FinalActivation::None,
            1 => FinalActivation::Sigmoid,
            _ => return Err(bad("unknown final activation")),
        };
        let has_scale = bytes[27] != 0;
        let scale = f64::from_le_bytes(bytes[28..36].try_into().unwrap());
        let count = u64::from_le_bytes(bytes[36..44].try_into().unwrap()) as usize;
        let config = MlpConfig {
            input_dim,
            final_activation,
            final_scale: if has_scale { Some(scale) } else { None },
            residual_skip,
        };
        config.validate()?;
        if count != config.n_params() {
            return Err(bad("parameter count does not match the architecture"));
        }
        if bytes.len() != 44 + 8 * count {
            return Err(bad("truncated parameter block"));
        }
        let params = bytes[44..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(Mlp { config, params })
    }

    pub fn save_checkpoint(&self, path: &Path) -> Result<()> {
        crate::metrics::write_atomic(path, &self.to_bytes())
    }

    pub fn load_checkpoint(path: &Path) -> Result<Mlp> {
        Mlp::from_bytes(&std::fs::read(path)?)
    }
}

impl PotentialFn for Mlp {
    fn value(&self, point: &[f64]) -> Result<f64> {
        self.forward(point)
    }

    fn jet1d(&self, x: f64) -> Result<Jet3> {
        self.forward_jet(Jet3::variable(x))
    }

    fn dual2(&self, x: f64, y: f64) -> Result<Dual2D> {
        self.forward_dual2(Dual2D::var_x(x), Dual2D::var_y(y))
    }
}

#[cfg(test)]
mod tests;
