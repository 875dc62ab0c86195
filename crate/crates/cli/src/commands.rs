//! The four subcommands.

use bcgc::runtime::{runtime_tau, runtime_tau_hat, s_to_x};
use bcgc::simulator::{
    relaxed_allocation, resolve_scheme, run_gd_training, sweep_experiment, DrawSet, LeastSquares,
    SchemeKind,
};
use bcgc::straggler::MAX_CLOSED_FORM_HARMONIC_N;
use bcgc::{BlockAllocation, CodingProfile, ShiftedExponential, SystemConfig, WorkerDraw};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{CommandKind, ExperimentSpec};
use crate::error::CliError;
use crate::output;

/// CSV bytes plus a human-readable summary for stderr.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub csv: Vec<u8>,
    pub summary: String,
}

pub fn execute(spec: &ExperimentSpec) -> Result<CommandOutput, CliError> {
    match spec.command {
        CommandKind::Solve => solve(spec),
        CommandKind::Sweep => sweep(spec),
        CommandKind::Train => train(spec),
        CommandKind::Validate => validate(spec),
    }
}

pub fn solve(spec: &ExperimentSpec) -> Result<CommandOutput, CliError> {
    let cfg = &spec.system;
    let dist = &spec.distribution;
    let kinds = [
        SchemeKind::Subgradient,
        SchemeKind::ClosedT,
        SchemeKind::ClosedF,
    ];
    let mut allocs: Vec<BlockAllocation> = Vec::with_capacity(3);
    for kind in kinds {
        let alloc = if spec.relaxed {
            relaxed_allocation(kind, cfg, dist, &spec.settings)?
        } else {
            resolve_scheme(kind, cfg, dist, &spec.settings)?.allocation
        };
        allocs.push(alloc);
    }
    let draws = DrawSet::sample(dist, cfg.n_workers, spec.draws, spec.seed ^ 0xe7a1);
    let mut summary = String::new();
    for (kind, alloc) in kinds.iter().zip(&allocs) {
        let est = draws.estimate(alloc.counts(), cfg.time_scale());
        summary.push_str(&format!(
            "{kind:<12} E[runtime] = {} +/- {}\n",
            output::fmt_num(est.mean),
            output::fmt_num(est.half_width_95)
        ));
    }
    Ok(CommandOutput {
        csv: output::solution_csv(&allocs[0], &allocs[1], &allocs[2]),
        summary,
    })
}

pub fn sweep(spec: &ExperimentSpec) -> Result<CommandOutput, CliError> {
    let sw = spec
        .sweep
        .as_ref()
        .ok_or(CliError::MissingParameter("axis"))?;
    let table = sweep_experiment(
        sw.axis,
        &sw.values,
        &spec.schemes,
        &spec.system,
        &spec.distribution,
        spec.draws,
        spec.seed,
        &spec.settings,
    )?;
    let summary = format!("{} cells, {} draws each\n", table.rows.len(), spec.draws);
    Ok(CommandOutput {
        csv: output::sweep_csv(&table),
        summary,
    })
}

pub fn train(spec: &ExperimentSpec) -> Result<CommandOutput, CliError> {
    let cfg = &spec.system;
    let kind = spec.schemes[0];
    let scheme = resolve_scheme(kind, cfg, &spec.distribution, &spec.settings)?;
    let data = LeastSquares::synthetic(cfg.n_samples, cfg.model_size, spec.seed);
    let step = spec.step.unwrap_or_else(|| data.safe_step());
    let trace = run_gd_training(
        cfg,
        &spec.distribution,
        &scheme,
        &data,
        spec.train_iters,
        step,
        spec.seed,
    )?;
    let worst = trace.gradient_errors.iter().fold(0.0f64, |a, &b| a.max(b));
    let summary = format!(
        "{kind}: loss {} -> {}, max gradient error {}\n",
        output::fmt_num(trace.losses[0]),
        output::fmt_num(*trace.losses.last().unwrap()),
        output::fmt_num(worst)
    );
    Ok(CommandOutput {
        csv: output::training_csv(&trace),
        summary,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub max_error: f64,
    pub tolerance: f64,
}

/// `t'` from the exponential-integral sum against quadrature.
pub fn check_harmonic_means() -> Result<CheckResult, CliError> {
    let tolerance = 1e-6;
    let mut worst = 0.0f64;
    for (mu, t0) in [
        (1e-3, 10.0),
        (1e-3, 50.0),
        (1e-3, 1000.0),
        (1.0, 1.0),
        (0.5, 4.0),
    ] {
        let dist = ShiftedExponential::new(mu, t0)?;
        for n in 1..=MAX_CLOSED_FORM_HARMONIC_N {
            let a = dist.harmonic_means_ei_sum(n)?;
            let b = dist.harmonic_means_quadrature(n)?;
            for (x, y) in a.iter().zip(&b) {
                worst = worst.max(((x - y) / y).abs());
            }
        }
    }
    Ok(CheckResult {
        name: "harmonic-means-ei-vs-quadrature",
        passed: worst <= tolerance,
        max_error: worst,
        tolerance,
    })
}

/// `τ(s, T)` against `τ̂(x(s), T)` on random sorted profiles and draws.
pub fn check_tau_equivalence(instances: usize, seed: u64) -> Result<CheckResult, CliError> {
    let tolerance = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..instances {
        let n = rng.random_range(1..=16usize);
        let l = rng.random_range(1..=64usize);
        let m = n * rng.random_range(1..=4usize);
        let cfg = SystemConfig::new(n, l, m, rng.random_range(0.5..2.0))?;
        let mut levels: Vec<usize> = (0..l).map(|_| rng.random_range(0..n)).collect();
        levels.sort_unstable();
        let profile = CodingProfile::new(levels, n)?;
        let draw = WorkerDraw::new((0..n).map(|_| rng.random_range(0.1..10.0)).collect())?;
        let tau = runtime_tau(&profile, &draw, &cfg)?;
        let tau_hat = runtime_tau_hat(&s_to_x(&profile, n)?, &draw, &cfg)?;
        worst = worst.max(((tau - tau_hat) / tau).abs());
    }
    Ok(CheckResult {
        name: "tau-equivalence",
        passed: worst <= tolerance,
        max_error: worst,
        tolerance,
    })
}

pub fn validate(spec: &ExperimentSpec) -> Result<CommandOutput, CliError> {
    let checks = vec![
        check_harmonic_means()?,
        check_tau_equivalence(10_000, spec.seed)?,
    ];
    let mut summary = String::new();
    for c in &checks {
        summary.push_str(&format!(
            "{} {} (max error {:e}, tolerance {:e})\n",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.max_error,
            c.tolerance
        ));
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    let out = CommandOutput {
        csv: output::checks_csv(&checks),
        summary,
    };
    if failed > 0 {
        output::emit(spec.output.as_deref(), &out.csv)?;
        eprint!("{}", out.summary);
        return Err(CliError::ChecksFailed {
            failed,
            total: checks.len(),
        });
    }
    Ok(out)
}
