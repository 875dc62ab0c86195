//! Common-random-number draw sets and runtime estimates.
//!
//! Draws are generated in fixed-size chunks, each from its own ChaCha stream
//! derived from the seed, so results do not depend on the thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::runtime::tau_hat_sorted;
use crate::straggler::StragglerModel;

const CHUNK: usize = 1024;

/// Mean with a 95% normal-approximation confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuntimeEstimate {
    pub mean: f64,
    /// `1.96 · (sample std) / √n_draws`.
    pub half_width_95: f64,
    pub n_draws: usize,
}

impl RuntimeEstimate {
    pub fn from_samples(values: &[f64]) -> Self {
        let n = values.len();
        assert!(
            n >= 2,
            "need at least two samples for a confidence interval"
        );
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
        Self {
            mean,
            half_width_95: 1.96 * var.sqrt() / (n as f64).sqrt(),
            n_draws: n,
        }
    }
}

/// `n_draws` sorted worker draws shared by every scheme evaluated on it.
#[derive(Debug, Clone)]
pub struct DrawSet {
    n_workers: usize,
    sorted: Vec<f64>,
}

impl DrawSet {
    pub fn sample<M: StragglerModel + ?Sized>(
        model: &M,
        n_workers: usize,
        n_draws: usize,
        seed: u64,
    ) -> Self {
        let mut sorted = vec![0.0; n_workers * n_draws];
        sorted
            .par_chunks_mut(n_workers * CHUNK)
            .enumerate()
            .for_each(|(chunk, block)| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(chunk as u64);
                for draw in block.chunks_mut(n_workers) {
                    model.sample_into(&mut rng, draw);
                    draw.sort_by(f64::total_cmp);
                }
            });
        Self { n_workers, sorted }
    }

    pub fn n_workers(&self) -> usize {
        self.n_workers
    }

    pub fn len(&self) -> usize {
        self.sorted.len() / self.n_workers
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Ascending order statistics of draw `i`.
    pub fn draw(&self, i: usize) -> &[f64] {
        &self.sorted[i * self.n_workers..(i + 1) * self.n_workers]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.sorted.chunks(self.n_workers)
    }

    /// `f` applied to each draw, in draw order.
    pub fn map<F>(&self, f: F) -> Vec<f64>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let mut out = vec![0.0; self.len()];
        out.par_chunks_mut(CHUNK)
            .zip(self.sorted.par_chunks(self.n_workers * CHUNK))
            .for_each(|(dst, src)| {
                for (d, draw) in dst.iter_mut().zip(src.chunks(self.n_workers)) {
                    *d = f(draw);
                }
            });
        out
    }

    /// Unscaled `τ̂(x, T)` for every draw.
    pub fn tau_hat_values(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_workers);
        self.map(|draw| tau_hat_sorted(x, draw))
    }

    /// Sample mean of unscaled `τ̂(x, T)`; summed in draw order.
    pub fn mean_tau_hat(&self, x: &[f64]) -> f64 {
        let v = self.tau_hat_values(x);
        v.iter().sum::<f64>() / v.len() as f64
    }

    /// Single-threaded [`Self::mean_tau_hat`], for use inside parallel loops.
    pub fn mean_tau_hat_serial(&self, x: &[f64]) -> f64 {
        self.iter().map(|draw| tau_hat_sorted(x, draw)).sum::<f64>() / self.len() as f64
    }

    /// Scaled runtime estimate `(M/N) b τ̂`.
    pub fn estimate(&self, x: &[f64], time_scale: f64) -> RuntimeEstimate {
        let v: Vec<f64> = self
            .tau_hat_values(x)
            .into_iter()
            .map(|t| t * time_scale)
            .collect();
        RuntimeEstimate::from_samples(&v)
    }
}
