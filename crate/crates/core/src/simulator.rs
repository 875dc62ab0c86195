//! Monte Carlo runtime evaluation, experiment sweeps and a gradient-descent
//! demo with simulated partial stragglers.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::coding::{
    allocate_samples, recover_gradient, ArrivalSchedule, BlockCode, GradientWorkspace,
};
use crate::error::{invalid, Error, Result};
pub use crate::montecarlo::{DrawSet, RuntimeEstimate};
use crate::optimizer::{
    closed_form_f, closed_form_t, round_allocation, solve_single_block, solve_subgradient,
    RoundingConfig, SubgradientConfig,
};
use crate::runtime::{check_alloc, runtime_tau, x_to_s, BlockAllocation, SystemConfig};
use crate::straggler::{ShiftedExponential, StragglerModel};

/// How a scheme's allocation is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    /// Rounded stochastic-subgradient optimum.
    Subgradient,
    /// Rounded closed form at `t = E[T_(n)]`.
    ClosedT,
    /// Rounded closed form at `t' = 1/E[1/T_(n)]`.
    ClosedF,
    /// Best single redundancy level for all coordinates.
    SingleBlock,
    /// Every coordinate tolerates exactly `s` stragglers.
    Uniform(usize),
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeKind::Subgradient => f.write_str("subgradient"),
            SchemeKind::ClosedT => f.write_str("closed-t"),
            SchemeKind::ClosedF => f.write_str("closed-f"),
            SchemeKind::SingleBlock => f.write_str("single-block"),
            SchemeKind::Uniform(s) => write!(f, "uniform:{s}"),
        }
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subgradient" => Ok(SchemeKind::Subgradient),
            "closed-t" => Ok(SchemeKind::ClosedT),
            "closed-f" => Ok(SchemeKind::ClosedF),
            "single-block" => Ok(SchemeKind::SingleBlock),
            other => other
                .strip_prefix("uniform:")
                .and_then(|level| level.parse().ok())
                .map(SchemeKind::Uniform)
                .ok_or_else(|| {
                    invalid(
                        "scheme",
                        format!(
                            "unknown scheme `{other}` (expected subgradient, closed-t, closed-f, single-block or uniform:<s>)"
                        ),
                    )
                }),
        }
    }
}

impl SchemeKind {
    pub fn is_proposed(&self) -> bool {
        matches!(
            self,
            SchemeKind::Subgradient | SchemeKind::ClosedT | SchemeKind::ClosedF
        )
    }
}

/// Knobs for turning a [`SchemeKind`] into an allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSettings {
    pub subgradient: SubgradientConfig,
    pub rounding: RoundingConfig,
    /// Draws for choosing the single-block level.
    pub single_block_draws: usize,
    pub seed: u64,
}

impl Default for SchemeSettings {
    fn default() -> Self {
        Self {
            subgradient: SubgradientConfig::default(),
            rounding: RoundingConfig::default(),
            single_block_draws: 10_000,
            seed: 0,
        }
    }
}

impl SchemeSettings {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.subgradient.seed = seed ^ 0x5b;
        self.rounding.seed = seed ^ 0x20;
        self
    }
}

/// A named integer allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeUnderTest {
    pub name: String,
    pub allocation: BlockAllocation,
}

impl SchemeUnderTest {
    pub fn new(
        name: impl Into<String>,
        allocation: BlockAllocation,
        cfg: &SystemConfig,
    ) -> Result<Self> {
        check_alloc(&allocation, cfg)?;
        Ok(Self {
            name: name.into(),
            allocation,
        })
    }
}

/// The relaxed allocation behind a proposed scheme (baselines are already integer).
pub fn relaxed_allocation<M: StragglerModel + ?Sized>(
    kind: SchemeKind,
    cfg: &SystemConfig,
    model: &M,
    settings: &SchemeSettings,
) -> Result<BlockAllocation> {
    let n = cfg.n_workers;
    match kind {
        SchemeKind::Subgradient => {
            Ok(solve_subgradient(cfg, model, &settings.subgradient)?.allocation)
        }
        SchemeKind::ClosedT => closed_form_t(cfg, &model.order_stat_means(n)),
        SchemeKind::ClosedF => closed_form_f(cfg, &model.order_stat_harmonic_means(n)?),
        SchemeKind::SingleBlock => solve_single_block(
            cfg,
            model,
            settings.single_block_draws,
            settings.seed ^ 0x51,
        ),
        SchemeKind::Uniform(s) => BlockAllocation::single_level(s, n, cfg.model_size),
    }
}

/// Builds the integer allocation for `kind`.
pub fn resolve_scheme<M: StragglerModel + ?Sized>(
    kind: SchemeKind,
    cfg: &SystemConfig,
    model: &M,
    settings: &SchemeSettings,
) -> Result<SchemeUnderTest> {
    let relaxed = relaxed_allocation(kind, cfg, model, settings)?;
    let allocation = round_allocation(&relaxed, cfg, model, &settings.rounding)?;
    SchemeUnderTest::new(kind.to_string(), allocation, cfg)
}

/// Sample mean and 95% half-width of `τ̂(x, T)` over `n_draws` i.i.d. draws.
pub fn estimate_expected_runtime<M: StragglerModel + ?Sized>(
    scheme: &SchemeUnderTest,
    cfg: &SystemConfig,
    model: &M,
    n_draws: usize,
    seed: u64,
) -> Result<RuntimeEstimate> {
    if n_draws < 2 {
        return Err(invalid("draws", "need at least two draws"));
    }
    check_alloc(&scheme.allocation, cfg)?;
    let draws = DrawSet::sample(model, cfg.n_workers, n_draws, seed);
    Ok(draws.estimate(scheme.allocation.counts(), cfg.time_scale()))
}

/// Parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Workers,
    Mu,
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxis::Workers => "N",
            SweepAxis::Mu => "mu",
        })
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "N" | "n" | "workers" => Ok(SweepAxis::Workers),
            "mu" => Ok(SweepAxis::Mu),
            other => Err(invalid(
                "axis",
                format!("unknown axis `{other}` (expected N or mu)"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis: SweepAxis,
    pub value: f64,
    pub scheme: String,
    pub allocation: BlockAllocation,
    pub estimate: RuntimeEstimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn get(&self, value: f64, scheme: &str) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.value == value && r.scheme == scheme)
    }
}

/// Full factorial sweep: for each axis value, every scheme is built and
/// evaluated on the same `n_draws` draws.
#[allow(clippy::too_many_arguments)]
pub fn sweep_experiment(
    axis: SweepAxis,
    values: &[f64],
    schemes: &[SchemeKind],
    cfg: &SystemConfig,
    dist: &ShiftedExponential,
    n_draws: usize,
    seed: u64,
    settings: &SchemeSettings,
) -> Result<SweepTable> {
    if values.is_empty() {
        return Err(invalid("values", "sweep needs at least one value"));
    }
    if schemes.is_empty() {
        return Err(invalid("scheme", "sweep needs at least one scheme"));
    }
    let mut rows = Vec::with_capacity(values.len() * schemes.len());
    for (cell, &value) in values.iter().enumerate() {
        let (cell_cfg, cell_dist) = match axis {
            SweepAxis::Workers => {
                if !(value >= 1.0) || value.fract() != 0.0 {
                    return Err(invalid(
                        "values",
                        format!("worker count must be a positive integer, got {value}"),
                    ));
                }
                let n = value as usize;
                (
                    SystemConfig::new(n, cfg.model_size, cfg.n_samples, cfg.cycles_per_coordinate)?,
                    *dist,
                )
            }
            SweepAxis::Mu => (*cfg, ShiftedExponential::new(value, dist.t0())?),
        };
        let cell_seed = mix(seed, cell as u64);
        let cell_settings = settings.clone().with_seed(cell_seed);
        let draws = DrawSet::sample(&cell_dist, cell_cfg.n_workers, n_draws, cell_seed ^ 0xd7a);
        for &kind in schemes {
            let scheme = resolve_scheme(kind, &cell_cfg, &cell_dist, &cell_settings)?;
            let estimate = draws.estimate(scheme.allocation.counts(), cell_cfg.time_scale());
            rows.push(SweepRow {
                axis,
                value,
                scheme: scheme.name,
                allocation: scheme.allocation,
                estimate,
            });
        }
    }
    Ok(SweepTable { rows })
}

fn mix(seed: u64, salt: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Least-squares data: `F(θ) = Σ_j ½ (a_jᵀθ − y_j)²`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub features: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
}

impl LeastSquares {
    /// Standard-normal features, targets from a random `θ*` plus noise.
    pub fn synthetic(n_samples: usize, n_features: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let truth: Vec<f64> = (0..n_features)
            .map(|_| rng.sample(StandardNormal))
            .collect();
        let mut features = Vec::with_capacity(n_samples);
        let mut targets = Vec::with_capacity(n_samples);
        for _ in 0..n_samples {
            let a: Vec<f64> = (0..n_features)
                .map(|_| rng.sample(StandardNormal))
                .collect();
            let noise: f64 = rng.sample(StandardNormal);
            targets.push(dot(&a, &truth) + 0.1 * noise);
            features.push(a);
        }
        Self { features, targets }
    }

    pub fn n_samples(&self) -> usize {
        self.features.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }

    pub fn loss(&self, theta: &[f64]) -> f64 {
        self.features
            .iter()
            .zip(&self.targets)
            .map(|(a, y)| 0.5 * (dot(a, theta) - y).powi(2))
            .sum()
    }

    /// `Σ_{j in samples} a_j (a_jᵀθ − y_j)`.
    pub fn partial_gradient(&self, samples: &[usize], theta: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; theta.len()];
        for &j in samples {
            let r = dot(&self.features[j], theta) - self.targets[j];
            for (gi, ai) in g.iter_mut().zip(&self.features[j]) {
                *gi += ai * r;
            }
        }
        g
    }

    pub fn gradient(&self, theta: &[f64]) -> Vec<f64> {
        let all: Vec<usize> = (0..self.n_samples()).collect();
        self.partial_gradient(&all, theta)
    }

    /// `1 / ‖A‖_F²`, below `1/λ_max(AᵀA)`, so fixed-step GD decreases the loss.
    pub fn safe_step(&self) -> f64 {
        let frob: f64 = self.features.iter().flatten().map(|v| v * v).sum();
        1.0 / frob
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingTrace {
    /// Loss before each iteration's update, then once more at the end.
    pub losses: Vec<f64>,
    /// Simulated time for the master to recover each iteration's gradient.
    pub runtimes: Vec<f64>,
    /// `‖decoded − centralized‖∞ / ‖centralized‖∞` per iteration.
    pub gradient_errors: Vec<f64>,
    pub theta: Vec<f64>,
}

/// Runs fixed-step gradient descent where every gradient is assembled by the
/// master from coded partial derivatives of simulated workers.
#[allow(clippy::too_many_arguments)]
pub fn run_gd_training<M: StragglerModel + ?Sized>(
    cfg: &SystemConfig,
    model: &M,
    scheme: &SchemeUnderTest,
    dataset: &LeastSquares,
    iters: usize,
    step: f64,
    seed: u64,
) -> Result<TrainingTrace> {
    if dataset.n_samples() != cfg.n_samples || dataset.n_features() != cfg.model_size {
        return Err(Error::DimensionMismatch {
            what: "dataset samples x features",
            expected: cfg.n_samples * cfg.model_size,
            actual: dataset.n_samples() * dataset.n_features(),
        });
    }
    if !(step > 0.0) || !step.is_finite() {
        return Err(invalid("step", format!("must be > 0, got {step}")));
    }
    check_alloc(&scheme.allocation, cfg)?;
    let profile = x_to_s(&scheme.allocation)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let assignment = allocate_samples(cfg, &profile, &mut rng)?;
    let code = BlockCode::for_profile(cfg.n_workers, &profile, &mut rng)?;

    let mut theta = vec![0.0; cfg.model_size];
    let mut trace = TrainingTrace {
        losses: Vec::with_capacity(iters + 1),
        runtimes: Vec::with_capacity(iters),
        gradient_errors: Vec::with_capacity(iters),
        theta: Vec::new(),
    };
    for _ in 0..iters {
        trace.losses.push(dataset.loss(&theta));
        let draw = model.sample_draw(cfg.n_workers, &mut rng);
        let partials: Vec<Vec<f64>> = assignment
            .subsets
            .iter()
            .map(|samples| dataset.partial_gradient(samples, &theta))
            .collect();
        let workspace = GradientWorkspace::encode(&code, &profile, &assignment, &partials)?;
        let arrivals = ArrivalSchedule::sequential(cfg, &profile, &draw)?;
        let recovery = recover_gradient(&workspace, &code, &profile, &arrivals)?;

        let central = dataset.gradient(&theta);
        let scale = central.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let err = recovery
            .gradient
            .iter()
            .zip(&central)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        trace
            .gradient_errors
            .push(if scale > 0.0 { err / scale } else { err });
        debug_assert_eq!(
            recovery.completion_time(),
            runtime_tau(&profile, &draw, cfg)?
        );
        trace.runtimes.push(recovery.completion_time());

        for (t, g) in theta.iter_mut().zip(&recovery.gradient) {
            *t -= step * g;
        }
    }
    trace.losses.push(dataset.loss(&theta));
    trace.theta = theta;
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::straggler::PointMass;

    #[test]
    fn scheme_names_round_trip() {
        for s in [
            "subgradient",
            "closed-t",
            "closed-f",
            "single-block",
            "uniform:3",
        ] {
            assert_eq!(s.parse::<SchemeKind>().unwrap().to_string(), s);
        }
        assert!("uniform:x".parse::<SchemeKind>().is_err());
        assert!("tandon".parse::<SchemeKind>().is_err());
    }

    #[test]
    fn point_mass_estimate_is_exact() {
        let cfg = SystemConfig::new(4, 4, 4, 1.0).unwrap();
        let p = PointMass::new(vec![0.1, 0.1, 0.25, 1.0]).unwrap();
        let scheme = SchemeUnderTest::new(
            "x",
            BlockAllocation::integer(vec![0, 2, 2, 0], 4).unwrap(),
            &cfg,
        )
        .unwrap();
        let e = estimate_expected_runtime(&scheme, &cfg, &p, 50, 1).unwrap();
        assert_eq!(e.mean, 1.0);
        assert_eq!(e.half_width_95, 0.0);
        assert!(estimate_expected_runtime(&scheme, &cfg, &p, 1, 1).is_err());
    }

    #[test]
    fn uniform_out_of_range() {
        let cfg = SystemConfig::new(4, 4, 4, 1.0).unwrap();
        let d = ShiftedExponential::new(1.0, 1.0).unwrap();
        assert!(
            resolve_scheme(SchemeKind::Uniform(4), &cfg, &d, &SchemeSettings::default()).is_err()
        );
    }

    #[test]
    fn least_squares_gradient_matches_finite_difference() {
        let ds = LeastSquares::synthetic(6, 3, 2);
        let theta = vec![0.3, -0.2, 0.5];
        let g = ds.gradient(&theta);
        for i in 0..3 {
            let h = 1e-6;
            let mut p = theta.clone();
            p[i] += h;
            let mut m = theta.clone();
            m[i] -= h;
            let fd = (ds.loss(&p) - ds.loss(&m)) / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-6 * g[i].abs().max(1.0));
        }
    }

    #[test]
    fn short_training_run() {
        let cfg = SystemConfig::new(4, 6, 8, 1.0).unwrap();
        let d = ShiftedExponential::new(1.0, 1.0).unwrap();
        let scheme = SchemeUnderTest::new(
            "x",
            BlockAllocation::integer(vec![1, 2, 0, 3], 6).unwrap(),
            &cfg,
        )
        .unwrap();
        let ds = LeastSquares::synthetic(8, 6, 3);
        let trace = run_gd_training(&cfg, &d, &scheme, &ds, 20, ds.safe_step(), 4).unwrap();
        assert_eq!(trace.losses.len(), 21);
        assert!(trace.gradient_errors.iter().all(|&e| e < 1e-9));
        assert!(trace.losses.windows(2).all(|w| w[1] < w[0]));
    }
}
