//! Data-parallel evaluation helpers with deterministic reductions.
//!
//! All batch work in this crate is embarrassingly parallel over points.
//! With the `parallel` feature (default) the maps fan out on rayon; without
//! it, or after [`set_parallel(false)`](set_parallel), they run sequentially.
//! Either way results are collected in input order and reduced with a fixed
//! pairwise tree, so sums are bit-identical regardless of thread count.

use std::sync::atomic::{AtomicBool, Ordering};

use crate::error::Result;

static PARALLEL_ENABLED: AtomicBool = AtomicBool::new(true);

/// Runtime switch between the rayon path and the sequential fallback.
/// Used by the benchmark suite to compare both on identical inputs.
pub fn set_parallel(enabled: bool) {
    PARALLEL_ENABLED.store(enabled, Ordering::Relaxed);
}

pub fn parallel_enabled() -> bool {
    cfg!(feature = "parallel") && PARALLEL_ENABLED.load(Ordering::Relaxed)
}

/// Build the global rayon pool with at most `n` threads. Call once, before
/// any parallel work. Returns quietly if the pool already exists.
#[cfg(feature = "parallel")]
pub fn configure_threads(n: usize) {
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
}

#[cfg(not(feature = "parallel"))]
pub fn configure_threads(_n: usize) {}

/// Order-preserving map.
pub fn map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    #[cfg(feature = "parallel")]
    if parallel_enabled() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// Order-preserving fallible map; the first error wins.
pub fn try_map<T: Sync, U: Send>(
    items: &[T],
    f: impl Fn(&T) -> Result<U> + Sync + Send,
) -> Result<Vec<U>> {
    #[cfg(feature = "parallel")]
    if parallel_enabled() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// Fixed-order pairwise summation. Deterministic for a given input order and
/// more accurate than a running sum on long inputs.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

/// Sum of per-item gradient contributions with a deterministic reduction:
/// items are processed in fixed chunks of [`GRAD_CHUNK`] (sequential within a
/// chunk), and chunk accumulators are folded in order. The chunking constant
/// is independent of thread count, so the result does not depend on it.
pub const GRAD_CHUNK: usize = 8;

pub fn accumulate_grads<T: Sync>(
    items: &[T],
    n_params: usize,
    per_item: impl Fn(&T, &mut [f64]) -> Result<f64> + Sync + Send,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let chunks: Vec<&[T]> = items.chunks(GRAD_CHUNK).collect();
    let run_chunk = |chunk: &&[T]| -> Result<(Vec<f64>, Vec<f64>)> {
        let mut grad = vec![0.0; n_params];
        let mut values = Vec::with_capacity(chunk.len());
        for item in chunk.iter() {
            values.push(per_item(item, &mut grad)?);
        }
        Ok((values, grad))
    };
    let partials = try_map(&chunks, run_chunk)?;
    let mut grad = vec![0.0; n_params];
    let mut values = Vec::with_capacity(items.len());
    for (vals, g) in partials {
        values.extend_from_slice(&vals);
        for (acc, gi) in grad.iter_mut().zip(g.iter()) {
            *acc += gi;
        }
    }
    Ok((values, grad))
}
