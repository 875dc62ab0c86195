//! Redundancy-allocation solvers.
//!
//! The relaxed problem minimizes `E[τ̂(x, T)]` over `{x >= 0, Σx = L}`. It is
//! convex and piecewise linear per draw, so a stochastic projected
//! subgradient method reaches the optimum; replacing `T` by `t = E[T_(n)]` or
//! by `t' = 1/E[1/T_(n)]` gives two cheap closed forms that equalize all `N`
//! terms of the max.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::montecarlo::{DrawSet, RuntimeEstimate};
use crate::runtime::{check_alloc, check_draw, BlockAllocation, SystemConfig};
use crate::special::harmonic_number;
use crate::straggler::{ShiftedExponential, StragglerModel, WorkerDraw};

const BISECTION_ITERS: usize = 200;

/// Euclidean projection of `v` onto `{x >= 0, Σx = total}`.
///
/// `x_i = max(v_i - ν, 0)` with the water level `ν` located by bisection and
/// then solved exactly on the final active set.
pub fn project_onto_feasible(v: &[f64], total: f64) -> Vec<f64> {
    assert!(total > 0.0, "projection target must be positive");
    assert!(!v.is_empty());
    let mass = |nu: f64| v.iter().map(|&vi| (vi - nu).max(0.0)).sum::<f64>();
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    // mass(lo) >= total, mass(hi) = 0
    let mut lo = min - total / v.len() as f64;
    let mut hi = max;
    for _ in 0..BISECTION_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mass(mid) >= total {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // With the active set fixed, Σ (v_i - ν) = total is linear in ν.
    let active: Vec<usize> = (0..v.len()).filter(|&i| v[i] > lo).collect();
    let nu = (active.iter().map(|&i| v[i]).sum::<f64>() - total) / active.len() as f64;
    let nu = if (mass(nu) - total).abs() <= (mass(lo) - total).abs() {
        nu
    } else {
        lo
    };
    v.iter().map(|&vi| (vi - nu).max(0.0)).collect()
}

/// Index of the first maximal inner term `T_(N-n) Σ_{i<=n}(i+1) x_i`.
fn active_term(x: &[f64], sorted: &[f64]) -> usize {
    let n = sorted.len();
    let mut prefix = 0.0;
    let mut best = (0, f64::NEG_INFINITY);
    for (i, &xi) in x.iter().enumerate() {
        prefix += (i + 1) as f64 * xi;
        let term = sorted[n - 1 - i] * prefix;
        if term > best.1 {
            best = (i, term);
        }
    }
    best.0
}

/// Adds `weight ·` the subgradient of unscaled `τ̂(·, T)` at `x` into `out`.
fn accumulate_subgradient(x: &[f64], sorted: &[f64], weight: f64, out: &mut [f64]) {
    let n = sorted.len();
    let star = active_term(x, sorted);
    let t = sorted[n - 1 - star] * weight;
    for (i, g) in out.iter_mut().enumerate().take(star + 1) {
        *g += t * (i + 1) as f64;
    }
}

/// A subgradient of `τ̂(·, T)` at `alloc`: with `n*` the first maximizing
/// term, `g_i = (M/N) b T_(N-n*) (i+1)` for `i <= n*` and zero after.
pub fn noisy_subgradient(
    alloc: &BlockAllocation,
    draw: &WorkerDraw,
    cfg: &SystemConfig,
) -> Result<Vec<f64>> {
    check_draw(draw, cfg)?;
    check_alloc(alloc, cfg)?;
    let sorted = draw.order_statistics();
    let mut g = vec![0.0; cfg.n_workers];
    accumulate_subgradient(alloc.counts(), &sorted, cfg.time_scale(), &mut g);
    Ok(g)
}

/// Hyperparameters of the stochastic projected subgradient method.
#[derive(Debug, Clone, PartialEq)]
pub struct SubgradientConfig {
    pub max_iters: usize,
    /// `c` in the step rule `η_k = c / √k`; `None` uses
    /// `L / (E[T_(N)] (M/N) b N)`.
    pub step_constant: Option<f64>,
    /// Draws averaged into each subgradient.
    pub batch: usize,
    pub seed: u64,
    /// Iterations between running-best checks.
    pub eval_every: usize,
    /// Size of the fixed draw set used for running-best checks.
    pub select_draws: usize,
    /// Fresh draws for the reported objective estimate.
    pub final_draws: usize,
}

impl Default for SubgradientConfig {
    fn default() -> Self {
        Self {
            max_iters: 20_000,
            step_constant: None,
            batch: 1,
            seed: 0,
            eval_every: 100,
            select_draws: 4_000,
            final_draws: 10_000,
        }
    }
}

impl SubgradientConfig {
    fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(invalid("max_iters", "must be >= 1"));
        }
        if self.batch == 0 {
            return Err(invalid("batch", "must be >= 1"));
        }
        if self.eval_every == 0 {
            return Err(invalid("eval_every", "must be >= 1"));
        }
        if self.select_draws < 2 || self.final_draws < 2 {
            return Err(invalid("draws", "need at least two evaluation draws"));
        }
        if let Some(c) = self.step_constant {
            if !(c > 0.0) || !c.is_finite() {
                return Err(invalid("step_constant", format!("must be > 0, got {c}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    /// Relaxed allocation, feasible for `{x >= 0, Σx = L}`.
    pub allocation: BlockAllocation,
    pub objective: RuntimeEstimate,
    pub iterations: usize,
}

/// Stochastic projected subgradient descent on `E[τ̂(x, T)]`, starting from
/// the uniform allocation. Returns the best iterate seen at the periodic
/// checks (on one fixed draw set), re-evaluated on fresh draws.
pub fn solve_subgradient<M: StragglerModel + ?Sized>(
    cfg: &SystemConfig,
    model: &M,
    sg: &SubgradientConfig,
) -> Result<SolveReport> {
    sg.validate()?;
    let n = cfg.n_workers;
    let total = cfg.model_size as f64;
    let final_set = DrawSet::sample(model, n, sg.final_draws, sg.seed ^ 0xf1a1);
    if n == 1 {
        let x = vec![total];
        return Ok(SolveReport {
            objective: final_set.estimate(&x, cfg.time_scale()),
            allocation: BlockAllocation::relaxed(x, cfg.model_size)?,
            iterations: 0,
        });
    }
    let select = DrawSet::sample(model, n, sg.select_draws, sg.seed ^ 0x5e1e);
    let slowest = model.order_stat_means(n)[n - 1];
    // Work in unscaled τ̂; the (M/N) b factor is folded into the step.
    let c = sg
        .step_constant
        .unwrap_or(total / (slowest * cfg.time_scale() * n as f64))
        * cfg.time_scale();

    let mut rng = ChaCha8Rng::seed_from_u64(sg.seed);
    let mut x = vec![total / n as f64; n];
    let mut best_x = x.clone();
    let mut best_val = select.mean_tau_hat(&x);
    let mut draw = vec![0.0; n];
    let mut g = vec![0.0; n];
    let weight = 1.0 / sg.batch as f64;
    for k in 1..=sg.max_iters {
        g.iter_mut().for_each(|v| *v = 0.0);
        for _ in 0..sg.batch {
            model.sample_into(&mut rng, &mut draw);
            draw.sort_by(f64::total_cmp);
            accumulate_subgradient(&x, &draw, weight, &mut g);
        }
        let eta = c / (k as f64).sqrt();
        let stepped: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - eta * gi).collect();
        x = project_onto_feasible(&stepped, total);
        if k % sg.eval_every == 0 || k == sg.max_iters {
            let val = select.mean_tau_hat(&x);
            if val < best_val {
                best_val = val;
                best_x.clone_from(&x);
            }
        }
    }
    Ok(SolveReport {
        objective: final_set.estimate(&best_x, cfg.time_scale()),
        allocation: BlockAllocation::relaxed(best_x, cfg.model_size)?,
        iterations: sg.max_iters,
    })
}

/// Minimizer of the deterministic `τ̂(x, t)` for ascending `t`:
///
/// `x_0 = m/t_N`, `x_n = (1/t_{N-n} - 1/t_{N+1-n}) m/(n+1)` with
/// `m = L / (Σ_{n=1}^{N-1} 1/(n(n+1) t_{N+1-n}) + 1/(N t_1))`.
pub fn closed_form(cfg: &SystemConfig, t: &[f64]) -> Result<BlockAllocation> {
    let n = cfg.n_workers;
    if t.len() != n {
        return Err(Error::DimensionMismatch {
            what: "order statistics",
            expected: n,
            actual: t.len(),
        });
    }
    if let Some(position) = t.iter().position(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::NonMonotone { position });
    }
    if let Some(position) = t.windows(2).position(|w| w[0] > w[1]) {
        return Err(Error::NonMonotone { position });
    }
    let m = equalized_level(cfg, t);
    // 1-based t_k is t[k - 1]
    let tk = |k: usize| t[k - 1];
    let mut x = Vec::with_capacity(n);
    x.push(m / tk(n));
    for level in 1..n {
        let diff = 1.0 / tk(n - level) - 1.0 / tk(n + 1 - level);
        x.push((diff * m / (level + 1) as f64).max(0.0));
    }
    // Rescale away rounding so the sum is L to the last bit we can manage.
    let sum: f64 = x.iter().sum();
    let l = cfg.model_size as f64;
    x.iter_mut().for_each(|v| *v *= l / sum);
    BlockAllocation::relaxed(x, cfg.model_size)
}

/// `m = L / (Σ_{n=1}^{N-1} 1/(n(n+1) t_{N+1-n}) + 1/(N t_1))`, the common
/// value of all inner terms at the closed form (unscaled).
pub fn equalized_level(cfg: &SystemConfig, t: &[f64]) -> f64 {
    let n = t.len();
    let denom: f64 = (1..n)
        .map(|k| 1.0 / ((k * (k + 1)) as f64 * t[n - k]))
        .sum::<f64>()
        + 1.0 / (n as f64 * t[0]);
    cfg.model_size as f64 / denom
}

/// Closed form at `t_n = E[T_(n)]`.
pub fn closed_form_t(cfg: &SystemConfig, t_mean: &[f64]) -> Result<BlockAllocation> {
    closed_form(cfg, t_mean)
}

/// Closed form at `t'_n = 1/E[1/T_(n)]`, optimal for deterministic CPU
/// frequencies `E[1/T_(n)]`.
pub fn closed_form_f(cfg: &SystemConfig, t_harmonic: &[f64]) -> Result<BlockAllocation> {
    closed_form(cfg, t_harmonic)
}

/// Floors every entry and hands the `L - Σ⌊x⌋` leftover units to the largest
/// fractional parts, ties going to the higher level.
pub fn round_largest_remainder(
    alloc: &BlockAllocation,
    model_size: usize,
) -> Result<BlockAllocation> {
    if let Some(c) = alloc.integer_counts() {
        return BlockAllocation::integer(c, model_size);
    }
    let x = alloc.counts();
    let mut counts: Vec<usize> = x.iter().map(|v| v.floor() as usize).collect();
    let floor_sum: usize = counts.iter().sum();
    let leftover = model_size
        .checked_sub(floor_sum)
        .ok_or_else(|| invalid("allocation", "floored entries exceed the model size"))?;
    let mut order: Vec<usize> = (0..x.len()).collect();
    let frac = |i: usize| x[i] - x[i].floor();
    order.sort_by(|&a, &b| frac(b).total_cmp(&frac(a)).then(b.cmp(&a)));
    for &i in order.iter().cycle().take(leftover) {
        counts[i] += 1;
    }
    BlockAllocation::integer(counts, model_size)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundingConfig {
    pub eval_draws: usize,
    /// Cap on accepted single-unit transfers.
    pub max_moves: usize,
    pub seed: u64,
}

impl Default for RoundingConfig {
    fn default() -> Self {
        Self {
            eval_draws: 2_000,
            max_moves: 200,
            seed: 0,
        }
    }
}

/// Rounds a relaxed allocation to an integer one: largest-remainder
/// rounding, then 1-opt search over single-unit transfers between levels,
/// judged on one common draw set. Transfers are tried in order of the
/// sample-mean subgradient gap `g_from - g_to` and the first improving one
/// is taken; the search stops when no transfer improves.
pub fn round_allocation<M: StragglerModel + ?Sized>(
    alloc: &BlockAllocation,
    cfg: &SystemConfig,
    model: &M,
    rounding: &RoundingConfig,
) -> Result<BlockAllocation> {
    check_alloc(alloc, cfg)?;
    let start = round_largest_remainder(alloc, cfg.model_size)?;
    if alloc.is_integer() || rounding.eval_draws == 0 || cfg.n_workers == 1 {
        return Ok(start);
    }
    let draws = DrawSet::sample(model, cfg.n_workers, rounding.eval_draws, rounding.seed);
    let mut counts = start.integer_counts().expect("integer");
    let mut x: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let mut current = draws.mean_tau_hat_serial(&x);
    let n = cfg.n_workers;
    let mut y = x.clone();
    for _ in 0..rounding.max_moves {
        let mut g = vec![0.0; n];
        for draw in draws.iter() {
            accumulate_subgradient(&x, draw, 1.0, &mut g);
        }
        let mut moves: Vec<(usize, usize)> = (0..n)
            .filter(|&from| counts[from] > 0)
            .flat_map(|from| {
                (0..n)
                    .filter(move |&to| to != from)
                    .map(move |to| (from, to))
            })
            .collect();
        moves.sort_by(|a, b| {
            (g[b.0] - g[b.1])
                .total_cmp(&(g[a.0] - g[a.1]))
                .then(a.cmp(b))
        });
        let mut accepted = None;
        for (from, to) in moves {
            y.copy_from_slice(&x);
            y[from] -= 1.0;
            y[to] += 1.0;
            let val = draws.mean_tau_hat_serial(&y);
            if val < current {
                accepted = Some((from, to, val));
                break;
            }
        }
        match accepted {
            Some((from, to, val)) => {
                counts[from] -= 1;
                counts[to] += 1;
                x[from] -= 1.0;
                x[to] += 1.0;
                current = val;
            }
            None => break,
        }
    }
    BlockAllocation::integer(counts, cfg.model_size)
}

/// Best allocation with every coordinate at one level, `x = L e_n`, chosen on
/// a common draw set (ties to the smaller level).
pub fn solve_single_block<M: StragglerModel + ?Sized>(
    cfg: &SystemConfig,
    model: &M,
    eval_draws: usize,
    seed: u64,
) -> Result<BlockAllocation> {
    let n = cfg.n_workers;
    if n == 1 {
        return BlockAllocation::single_level(0, 1, cfg.model_size);
    }
    if eval_draws == 0 {
        return Err(invalid("eval_draws", "need at least one draw"));
    }
    let draws = DrawSet::sample(model, n, eval_draws, seed);
    let l = cfg.model_size as f64;
    let mut best = (0, f64::INFINITY);
    for level in 0..n {
        let mut x = vec![0.0; n];
        x[level] = l;
        let val = draws.mean_tau_hat(&x);
        if val < best.1 {
            best = (level, val);
        }
    }
    BlockAllocation::single_level(best.0, n, cfg.model_size)
}

/// Analytic upper bounds on `E[τ̂(x_t, T)] / τ̂*` and `E[τ̂(x_f, T)] / τ̂*`
/// under shifted-exponential cycle times:
/// `(H_N + 1)(H_N + μt0)/(μt0)²` and `H_N/(μt0) + 1`.
pub fn gap_bounds(n_workers: usize, dist: &ShiftedExponential) -> Result<(f64, f64)> {
    if dist.t0() == 0.0 {
        return Err(Error::ZeroShift);
    }
    if n_workers == 0 {
        return Err(invalid("workers", "need at least one worker"));
    }
    let h = harmonic_number(n_workers);
    let a = dist.mu() * dist.t0();
    Ok(((h + 1.0) * (h + a) / (a * a), h / a + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runtime::tau_hat_terms;
    use crate::straggler::PointMass;

    fn cfg(n: usize, l: usize) -> SystemConfig {
        SystemConfig::new(n, l, n, 1.0).unwrap()
    }

    #[test]
    fn projection_examples() {
        let v = vec![1.0, 2.5, 0.5];
        let p = project_onto_feasible(&v, 4.0);
        for (a, b) in p.iter().zip(&v) {
            assert!((a - b).abs() < 1e-12);
        }
        let p = project_onto_feasible(&[3.0; 5], 10.0);
        assert!(p.iter().all(|&x| (x - 2.0).abs() < 1e-12));
        let p = project_onto_feasible(&[-1.0, 7.0], 6.0);
        assert_eq!(p, vec![0.0, 6.0]);
    }

    #[test]
    fn projection_sum_is_tight() {
        let v: Vec<f64> = (0..50)
            .map(|i| ((i * 37 % 11) as f64 - 5.0) * 1e3)
            .collect();
        let p = project_onto_feasible(&v, 2e4);
        assert!(p.iter().all(|&x| x >= 0.0));
        assert!((p.iter().sum::<f64>() - 2e4).abs() <= 1e-10 * 2e4);
    }

    #[test]
    fn subgradient_examples() {
        let c = SystemConfig::new(4, 4, 4, 1.0).unwrap();
        let draw = WorkerDraw::new(vec![0.1, 0.1, 0.25, 1.0]).unwrap();
        let x = BlockAllocation::integer(vec![0, 2, 2, 0], 4).unwrap();
        assert_eq!(
            noisy_subgradient(&x, &draw, &c).unwrap(),
            vec![0.25, 0.5, 0.0, 0.0]
        );
        let x = BlockAllocation::single_level(0, 4, 4).unwrap();
        assert_eq!(
            noisy_subgradient(&x, &draw, &c).unwrap(),
            vec![1.0, 0.0, 0.0, 0.0]
        );
    }

    #[test]
    fn closed_form_two_workers() {
        let x = closed_form(&cfg(2, 4), &[1.0, 3.0]).unwrap();
        assert!((x.counts()[0] - 2.0).abs() < 1e-12 && (x.counts()[1] - 2.0).abs() < 1e-12);
        assert!((equalized_level(&cfg(2, 4), &[1.0, 3.0]) - 6.0).abs() < 1e-12);
        let x = closed_form_f(&cfg(2, 4), &[1.0, 3.0]).unwrap();
        assert!((x.counts()[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_equal_times() {
        let x = closed_form_t(&cfg(5, 100), &[2.0; 5]).unwrap();
        assert_eq!(x.counts(), &[100.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn closed_form_equalizes() {
        let d = ShiftedExponential::new(1e-3, 50.0).unwrap();
        let c = SystemConfig::new(10, 20_000, 50, 1.0).unwrap();
        let t = d.order_stat_harmonic_means(10).unwrap();
        let x = closed_form_f(&c, &t).unwrap();
        let m = equalized_level(&c, &t);
        for term in tau_hat_terms(x.counts(), &t) {
            assert!((term - m).abs() / m < 1e-9);
        }
    }

    #[test]
    fn closed_form_rejects_unsorted() {
        assert!(matches!(
            closed_form(&cfg(3, 4), &[1.0, 3.0, 2.0]),
            Err(Error::NonMonotone { position: 1 })
        ));
        assert!(closed_form(&cfg(3, 4), &[0.0, 1.0, 2.0]).is_err());
        assert!(closed_form(&cfg(3, 4), &[1.0, 2.0]).is_err());
    }

    #[test]
    fn rounding_examples() {
        let x = BlockAllocation::relaxed(vec![1.2, 2.8], 4).unwrap();
        assert_eq!(
            round_largest_remainder(&x, 4)
                .unwrap()
                .integer_counts()
                .unwrap(),
            vec![1, 3]
        );
        let x = BlockAllocation::relaxed(vec![1.5, 2.5], 4).unwrap();
        assert_eq!(
            round_largest_remainder(&x, 4)
                .unwrap()
                .integer_counts()
                .unwrap(),
            vec![1, 3]
        );
        let x = BlockAllocation::integer(vec![3, 0, 1], 4).unwrap();
        let d = ShiftedExponential::new(1.0, 1.0).unwrap();
        let r = round_allocation(&x, &cfg(3, 4), &d, &RoundingConfig::default()).unwrap();
        assert_eq!(r, x);
    }

    #[test]
    fn local_search_never_worsens() {
        let d = ShiftedExponential::new(1e-3, 50.0).unwrap();
        let c = SystemConfig::new(8, 500, 8, 1.0).unwrap();
        let x = closed_form_t(&c, &d.order_stat_means(8)).unwrap();
        let rc = RoundingConfig {
            eval_draws: 1000,
            max_moves: 50,
            seed: 5,
        };
        let start = round_largest_remainder(&x, 500).unwrap();
        let r = round_allocation(&x, &c, &d, &rc).unwrap();
        assert_eq!(r.integer_counts().unwrap().iter().sum::<usize>(), 500);
        let set = DrawSet::sample(&d, 8, 1000, 5);
        assert!(set.mean_tau_hat(r.counts()) <= set.mean_tau_hat(start.counts()));
    }

    #[test]
    fn single_block_cases() {
        let d = ShiftedExponential::new(1.0, 1.0).unwrap();
        let one = SystemConfig::new(1, 9, 1, 1.0).unwrap();
        assert_eq!(
            solve_single_block(&one, &d, 100, 0)
                .unwrap()
                .integer_counts()
                .unwrap(),
            vec![9]
        );
        let p = PointMass::new(vec![2.0; 4]).unwrap();
        let x = solve_single_block(&cfg(4, 10), &p, 10, 0).unwrap();
        assert_eq!(x.integer_counts().unwrap(), vec![10, 0, 0, 0]);
    }

    #[test]
    fn gap_bound_values() {
        let d = ShiftedExponential::new(0.5, 2.0).unwrap();
        let (b1, b2) = gap_bounds(1, &d).unwrap();
        assert!((b1 - 2.0 * 2.0).abs() < 1e-12);
        assert!((b2 - 2.0).abs() < 1e-12);
        let mut prev = (0.0, 0.0);
        for n in 1..60 {
            let b = gap_bounds(n, &d).unwrap();
            assert!(b.0 >= prev.0 && b.1 >= prev.1);
            prev = b;
        }
        assert!(gap_bounds(3, &ShiftedExponential::new(1.0, 0.0).unwrap()).is_err());
    }

    #[test]
    fn degenerate_times_converge_to_closed_form() {
        let t = vec![1.0, 1.5, 2.0, 4.0, 9.0];
        let p = PointMass::new(vec![4.0, 1.0, 9.0, 1.5, 2.0]).unwrap();
        let c = SystemConfig::new(5, 1000, 5, 1.0).unwrap();
        let sg = SubgradientConfig {
            max_iters: 20_000,
            select_draws: 2,
            final_draws: 2,
            ..Default::default()
        };
        let r = solve_subgradient(&c, &p, &sg).unwrap();
        let xt = closed_form_t(&c, &t).unwrap();
        let l1: f64 = r
            .allocation
            .counts()
            .iter()
            .zip(xt.counts())
            .map(|(a, b)| (a - b).abs())
            .sum();
        assert!(
            l1 <= 0.01 * 1000.0,
            "{:?} vs {:?}",
            r.allocation.counts(),
            xt.counts()
        );
        assert_eq!(r.objective.half_width_95, 0.0);
    }

    #[test]
    fn single_worker_solve() {
        let d = ShiftedExponential::new(1.0, 1.0).unwrap();
        let r = solve_subgradient(
            &SystemConfig::new(1, 7, 1, 1.0).unwrap(),
            &d,
            &SubgradientConfig::default(),
        )
        .unwrap();
        assert_eq!(r.allocation.counts(), &[7.0]);
        assert_eq!(r.iterations, 0);
    }
}
