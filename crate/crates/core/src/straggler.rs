//! Worker cycle-time model and order-statistic summaries.
//!
//! Each worker's CPU cycle time is an i.i.d. draw from a known distribution.
//! The shifted exponential `Pr[T <= t] = 1 - exp(-mu (t - t0))`, `t >= t0`,
//! has closed forms for the order-statistic means; any other model only needs
//! to implement sampling and gets Monte Carlo summaries.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::error::{invalid, Error, Result};
use crate::quadrature;
use crate::special::{harmonic_number, scaled_e1};

/// Draws used by the generic Monte Carlo order-statistic estimates.
const GENERIC_SUMMARY_DRAWS: usize = 200_000;
const GENERIC_SUMMARY_SEED: u64 = 0x6f72_6465_7273;

/// Largest `N` for which the alternating Ei sum for `t'` is trusted.
pub const MAX_CLOSED_FORM_HARMONIC_N: usize = 12;

/// A source of i.i.d. worker cycle times.
pub trait StragglerModel: Sync {
    /// Fills `out` with one i.i.d. cycle time per worker.
    fn sample_into(&self, rng: &mut dyn RngCore, out: &mut [f64]);

    /// `t_n = E[T_(n)]`, `n = 1..=N`.
    fn order_stat_means(&self, n_workers: usize) -> Vec<f64> {
        monte_carlo_summary(self, n_workers, GENERIC_SUMMARY_DRAWS, GENERIC_SUMMARY_SEED).t_mean
    }

    /// `t'_n = 1 / E[1 / T_(n)]`, `n = 1..=N`.
    fn order_stat_harmonic_means(&self, n_workers: usize) -> Result<Vec<f64>> {
        Ok(
            monte_carlo_summary(self, n_workers, GENERIC_SUMMARY_DRAWS, GENERIC_SUMMARY_SEED)
                .t_harmonic,
        )
    }

    fn sample_draw(&self, n_workers: usize, rng: &mut dyn RngCore) -> WorkerDraw {
        let mut times = vec![0.0; n_workers];
        self.sample_into(rng, &mut times);
        WorkerDraw { times }
    }
}

/// Shifted-exponential cycle times with rate `mu` and shift `t0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedExponential {
    mu: f64,
    t0: f64,
    exp: Exp<f64>,
}

impl ShiftedExponential {
    pub fn new(mu: f64, t0: f64) -> Result<Self> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(invalid(
                "mu",
                format!("rate must be finite and > 0, got {mu}"),
            ));
        }
        if !(t0 >= 0.0) || !t0.is_finite() {
            return Err(invalid(
                "t0",
                format!("shift must be finite and >= 0, got {t0}"),
            ));
        }
        let exp = Exp::new(mu).map_err(|e| invalid("mu", e.to_string()))?;
        Ok(Self { mu, t0, exp })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn mean(&self) -> f64 {
        1.0 / self.mu + self.t0
    }

    /// `t'` from the alternating exponential-integral sum.
    ///
    /// The sum cancels catastrophically as `N` grows; it is kept as a
    /// cross-check for `N <= MAX_CLOSED_FORM_HARMONIC_N`.
    pub fn harmonic_means_ei_sum(&self, n_workers: usize) -> Result<Vec<f64>> {
        if self.t0 == 0.0 {
            return Err(Error::ZeroShift);
        }
        let big_n = n_workers;
        let a = self.mu * self.t0;
        Ok((1..=big_n)
            .map(|n| {
                let mut sum = 0.0;
                for i in 0..n {
                    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                    let z = a * (big_n - n + i + 1) as f64;
                    sum += sign * binomial(n - 1, i) * scaled_e1(z);
                }
                let inv = self.mu * (big_n + 1 - n) as f64 * binomial(big_n, n - 1) * sum;
                1.0 / inv
            })
            .collect())
    }

    /// `t'` by adaptive quadrature of `E[1/T_(n)]` against the order-statistic
    /// density, written in the variable `y = mu (t - t0)`.
    pub fn harmonic_means_quadrature(&self, n_workers: usize) -> Result<Vec<f64>> {
        if self.t0 == 0.0 {
            return Err(Error::ZeroShift);
        }
        let big_n = n_workers;
        let (mu, t0) = (self.mu, self.t0);
        let h_n = harmonic_number(big_n);
        Ok((1..=big_n)
            .map(|n| {
                let k = (big_n - n + 1) as f64;
                let log_c = ln_factorial(big_n) - ln_factorial(n - 1) - ln_factorial(big_n - n);
                let density = move |y: f64| {
                    if y == 0.0 {
                        return if n == 1 { log_c.exp() } else { 0.0 };
                    }
                    let log_p = log_c + (n - 1) as f64 * (-(-y).exp_m1()).ln() - k * y;
                    log_p.exp()
                };
                let center = h_n - harmonic_number(big_n - n);
                let upper = center + 60.0 / k;
                // Split at the bulk of the density so the adaptive rule sees it.
                let f = |y: f64| density(y) / (t0 + y / mu);
                let split = center.min(upper);
                let head = quadrature::integrate(f, 0.0, split, 1e-13, 0.0);
                let tail = quadrature::integrate(f, split, upper, 1e-13, 0.0);
                1.0 / (head + tail)
            })
            .collect())
    }
}

impl StragglerModel for ShiftedExponential {
    fn sample_into(&self, rng: &mut dyn RngCore, out: &mut [f64]) {
        for t in out.iter_mut() {
            *t = self.t0 + self.exp.sample(rng);
        }
    }

    /// `t_n = (H_N - H_{N-n}) / mu + t0`.
    fn order_stat_means(&self, n_workers: usize) -> Vec<f64> {
        let h_n = harmonic_number(n_workers);
        (1..=n_workers)
            .map(|n| (h_n - harmonic_number(n_workers - n)) / self.mu + self.t0)
            .collect()
    }

    fn order_stat_harmonic_means(&self, n_workers: usize) -> Result<Vec<f64>> {
        self.harmonic_means_quadrature(n_workers)
    }
}

/// Every worker has the same fixed cycle times on every draw (a point mass).
///
/// Useful as a degenerate straggler model: the runtime becomes deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct PointMass {
    times: Vec<f64>,
}

impl PointMass {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(invalid("times", "at least one worker required"));
        }
        if let Some(t) = times.iter().find(|t| !(**t > 0.0) || !t.is_finite()) {
            return Err(invalid(
                "times",
                format!("cycle times must be positive, got {t}"),
            ));
        }
        Ok(Self { times })
    }

    fn sorted(&self, n_workers: usize) -> Vec<f64> {
        assert_eq!(
            n_workers,
            self.times.len(),
            "point mass has a fixed worker count"
        );
        let mut v = self.times.clone();
        v.sort_by(f64::total_cmp);
        v
    }
}

impl StragglerModel for PointMass {
    fn sample_into(&self, _rng: &mut dyn RngCore, out: &mut [f64]) {
        out.copy_from_slice(&self.times);
    }

    fn order_stat_means(&self, n_workers: usize) -> Vec<f64> {
        self.sorted(n_workers)
    }

    fn order_stat_harmonic_means(&self, n_workers: usize) -> Result<Vec<f64>> {
        Ok(self.sorted(n_workers))
    }
}

/// One realization of the `N` workers' cycle times.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkerDraw {
    times: Vec<f64>,
}

impl WorkerDraw {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(invalid("times", "at least one worker required"));
        }
        if let Some(t) = times.iter().find(|t| !(**t > 0.0) || !t.is_finite()) {
            return Err(invalid(
                "times",
                format!("cycle times must be positive, got {t}"),
            ));
        }
        Ok(Self { times })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Ascending order statistics `T_(1) <= ... <= T_(N)`.
    pub fn order_statistics(&self) -> Vec<f64> {
        let mut v = self.times.clone();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// `t` and `t'` for a given worker count.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderStatSummary {
    pub t_mean: Vec<f64>,
    pub t_harmonic: Vec<f64>,
}

impl OrderStatSummary {
    pub fn compute<M: StragglerModel + ?Sized>(model: &M, n_workers: usize) -> Result<Self> {
        Ok(Self {
            t_mean: model.order_stat_means(n_workers),
            t_harmonic: model.order_stat_harmonic_means(n_workers)?,
        })
    }
}

/// Sample means of `T_(n)` and of `1/T_(n)` over `draws` sorted draws.
pub fn monte_carlo_summary<M: StragglerModel + ?Sized>(
    model: &M,
    n_workers: usize,
    draws: usize,
    seed: u64,
) -> OrderStatSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut buf = vec![0.0; n_workers];
    let mut sum = vec![0.0; n_workers];
    let mut sum_inv = vec![0.0; n_workers];
    for _ in 0..draws {
        model.sample_into(&mut rng, &mut buf);
        buf.sort_by(f64::total_cmp);
        for (i, &t) in buf.iter().enumerate() {
            sum[i] += t;
            sum_inv[i] += 1.0 / t;
        }
    }
    let d = draws as f64;
    OrderStatSummary {
        t_mean: sum.iter().map(|s| s / d).collect(),
        t_harmonic: sum_inv.iter().map(|s| d / s).collect(),
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}
