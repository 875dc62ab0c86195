//! Overall-runtime model and the profile/allocation change of variables.
//!
//! A coding profile `s` assigns each of the `L` coordinates a straggler
//! tolerance in `0..N`. Coordinates are computed in order, so a sorted
//! profile is the same thing as a block allocation `x`, where `x_n` counts
//! the coordinates that tolerate exactly `n` stragglers.

use crate::error::{invalid, Error, Result};
use crate::straggler::WorkerDraw;

/// Problem dimensions: `N` workers, `L` coordinates, `M` samples and `b`
/// CPU cycles per partial derivative per sample.
///
/// The runtime model only needs the ratio `M/N`; an even split of the
/// samples is checked where samples are actually partitioned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    pub n_workers: usize,
    pub model_size: usize,
    pub n_samples: usize,
    pub cycles_per_coordinate: f64,
}

impl SystemConfig {
    pub fn new(
        n_workers: usize,
        model_size: usize,
        n_samples: usize,
        cycles_per_coordinate: f64,
    ) -> Result<Self> {
        if n_workers == 0 {
            return Err(invalid("workers", "need at least one worker"));
        }
        if model_size == 0 {
            return Err(invalid("model-size", "need at least one coordinate"));
        }
        if n_samples == 0 {
            return Err(invalid("samples-m", "need at least one sample"));
        }
        if !(cycles_per_coordinate > 0.0) || !cycles_per_coordinate.is_finite() {
            return Err(invalid(
                "cycles-b",
                format!("must be finite and > 0, got {cycles_per_coordinate}"),
            ));
        }
        Ok(Self {
            n_workers,
            model_size,
            n_samples,
            cycles_per_coordinate,
        })
    }

    /// `(M/N) b`, the cycles each worker spends per unit of coded work.
    pub fn time_scale(&self) -> f64 {
        self.n_samples as f64 / self.n_workers as f64 * self.cycles_per_coordinate
    }

    /// `M/N` when the samples split evenly across workers.
    pub fn subset_size(&self) -> Result<usize> {
        if self.n_samples % self.n_workers != 0 {
            return Err(Error::Indivisible {
                samples: self.n_samples,
                workers: self.n_workers,
            });
        }
        Ok(self.n_samples / self.n_workers)
    }
}

/// Per-coordinate straggler tolerances `s_1..s_L`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CodingProfile {
    levels: Vec<usize>,
}

impl CodingProfile {
    /// Checks every level against `0..n_workers`.
    pub fn new(levels: Vec<usize>, n_workers: usize) -> Result<Self> {
        if levels.is_empty() {
            return Err(invalid("profile", "need at least one coordinate"));
        }
        if let Some(&s) = levels.iter().find(|&&s| s >= n_workers) {
            return Err(invalid(
                "profile",
                format!("tolerance {s} out of range for {n_workers} workers"),
            ));
        }
        Ok(Self { levels })
    }

    pub fn uniform(level: usize, model_size: usize, n_workers: usize) -> Result<Self> {
        Self::new(vec![level; model_size], n_workers)
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn max_level(&self) -> usize {
        self.levels.iter().copied().max().unwrap_or(0)
    }

    pub fn is_sorted(&self) -> bool {
        self.first_descent().is_none()
    }

    fn first_descent(&self) -> Option<usize> {
        self.levels.windows(2).position(|w| w[0] > w[1])
    }
}

/// Coordinate counts `x_0..x_{N-1}` per redundancy level.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockAllocation {
    counts: Vec<f64>,
    integer: bool,
}

impl BlockAllocation {
    /// A relaxed allocation: `x >= 0` and `|Σx - L| <= 1e-9 L`.
    pub fn relaxed(counts: Vec<f64>, model_size: usize) -> Result<Self> {
        if counts.is_empty() {
            return Err(invalid("allocation", "need at least one level"));
        }
        if let Some(v) = counts.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(invalid(
                "allocation",
                format!("entries must be >= 0, got {v}"),
            ));
        }
        let sum: f64 = counts.iter().sum();
        let l = model_size as f64;
        if (sum - l).abs() > 1e-9 * l {
            return Err(Error::SumMismatch {
                expected: l,
                actual: sum,
            });
        }
        Ok(Self {
            counts,
            integer: false,
        })
    }

    /// An integer allocation summing exactly to `L`.
    pub fn integer(counts: Vec<usize>, model_size: usize) -> Result<Self> {
        if counts.is_empty() {
            return Err(invalid("allocation", "need at least one level"));
        }
        let sum: usize = counts.iter().sum();
        if sum != model_size {
            return Err(Error::SumMismatch {
                expected: model_size as f64,
                actual: sum as f64,
            });
        }
        Ok(Self {
            counts: counts.into_iter().map(|c| c as f64).collect(),
            integer: true,
        })
    }

    /// All `L` coordinates at a single redundancy level.
    pub fn single_level(level: usize, n_workers: usize, model_size: usize) -> Result<Self> {
        if level >= n_workers {
            return Err(invalid(
                "level",
                format!("level {level} out of range for {n_workers} workers"),
            ));
        }
        let mut counts = vec![0; n_workers];
        counts[level] = model_size;
        Self::integer(counts, model_size)
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn is_integer(&self) -> bool {
        self.integer
    }

    pub fn n_levels(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }

    /// Integer counts, if this allocation is integer-flagged.
    pub fn integer_counts(&self) -> Option<Vec<usize>> {
        self.integer
            .then(|| self.counts.iter().map(|&c| c as usize).collect())
    }
}

/// `τ(s, T) = (M/N) b max_l T_(N - s_l) Σ_{i<=l} (s_i + 1)`.
pub fn runtime_tau(profile: &CodingProfile, draw: &WorkerDraw, cfg: &SystemConfig) -> Result<f64> {
    check_draw(draw, cfg)?;
    if profile.len() != cfg.model_size {
        return Err(Error::DimensionMismatch {
            what: "coordinates",
            expected: cfg.model_size,
            actual: profile.len(),
        });
    }
    let sorted = draw.order_statistics();
    Ok(cfg.time_scale() * tau_sorted(profile, &sorted)?)
}

/// `max_l T_(N - s_l) Σ_{i<=l}(s_i + 1)` for ascending order statistics.
pub(crate) fn tau_sorted(profile: &CodingProfile, sorted: &[f64]) -> Result<f64> {
    let n = sorted.len();
    let mut work = 0u64;
    let mut worst = 0.0f64;
    for &s in profile.levels() {
        if s >= n {
            return Err(invalid(
                "profile",
                format!("tolerance {s} out of range for {n} workers"),
            ));
        }
        work += s as u64 + 1;
        worst = worst.max(sorted[n - 1 - s] * work as f64);
    }
    Ok(worst)
}

/// `τ̂(x, T) = (M/N) b max_n T_(N - n) Σ_{i<=n} (i + 1) x_i`.
pub fn runtime_tau_hat(
    alloc: &BlockAllocation,
    draw: &WorkerDraw,
    cfg: &SystemConfig,
) -> Result<f64> {
    check_draw(draw, cfg)?;
    check_alloc(alloc, cfg)?;
    let sorted = draw.order_statistics();
    Ok(cfg.time_scale() * tau_hat_sorted(alloc.counts(), &sorted))
}

pub(crate) fn check_draw(draw: &WorkerDraw, cfg: &SystemConfig) -> Result<()> {
    if draw.len() != cfg.n_workers {
        return Err(Error::DimensionMismatch {
            what: "worker times",
            expected: cfg.n_workers,
            actual: draw.len(),
        });
    }
    Ok(())
}

pub(crate) fn check_alloc(alloc: &BlockAllocation, cfg: &SystemConfig) -> Result<()> {
    if alloc.n_levels() != cfg.n_workers {
        return Err(Error::DimensionMismatch {
            what: "allocation levels",
            expected: cfg.n_workers,
            actual: alloc.n_levels(),
        });
    }
    let l = cfg.model_size as f64;
    let sum = alloc.total();
    let tol = if alloc.is_integer() { 0.0 } else { 1e-9 * l };
    if (sum - l).abs() > tol {
        return Err(Error::SumMismatch {
            expected: l,
            actual: sum,
        });
    }
    Ok(())
}

/// Unscaled `τ̂` for ascending order statistics `sorted`, `sorted.len() == x.len()`.
#[inline]
pub fn tau_hat_sorted(x: &[f64], sorted: &[f64]) -> f64 {
    let n = sorted.len();
    let mut prefix = 0.0;
    let mut worst = 0.0f64;
    for (i, &xi) in x.iter().enumerate() {
        prefix += (i + 1) as f64 * xi;
        worst = worst.max(sorted[n - 1 - i] * prefix);
    }
    worst
}

/// The `N` unscaled inner terms `T_(N-n) Σ_{i<=n}(i+1) x_i` of `τ̂`.
pub fn tau_hat_terms(x: &[f64], sorted: &[f64]) -> Vec<f64> {
    let n = sorted.len();
    let mut prefix = 0.0;
    x.iter()
        .enumerate()
        .map(|(i, &xi)| {
            prefix += (i + 1) as f64 * xi;
            sorted[n - 1 - i] * prefix
        })
        .collect()
}

/// `x_n = #{l : s_l = n}` for a sorted profile.
pub fn s_to_x(profile: &CodingProfile, n_workers: usize) -> Result<BlockAllocation> {
    if let Some(position) = profile.first_descent() {
        return Err(Error::UnsortedProfile { position });
    }
    let mut counts = vec![0usize; n_workers];
    for &s in profile.levels() {
        if s >= n_workers {
            return Err(invalid(
                "profile",
                format!("tolerance {s} out of range for {n_workers} workers"),
            ));
        }
        counts[s] += 1;
    }
    BlockAllocation::integer(counts, profile.len())
}

/// `s_l = min { i : Σ_{n<=i} x_n >= l }`, the sorted profile of an integer allocation.
pub fn x_to_s(alloc: &BlockAllocation) -> Result<CodingProfile> {
    let counts = alloc.integer_counts().ok_or(Error::NotInteger)?;
    let n_workers = counts.len();
    let levels: Vec<usize> = counts
        .iter()
        .enumerate()
        .flat_map(|(level, &c)| std::iter::repeat_n(level, c))
        .collect();
    CodingProfile::new(levels, n_workers)
}
