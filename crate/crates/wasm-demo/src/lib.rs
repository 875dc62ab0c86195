//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Each exported function has a plain-Rust twin in [`demo`] so the logic is
//! testable natively.

use wasm_bindgen::prelude::*;

pub mod demo {
    use bcgc::optimizer::{closed_form_f, closed_form_t, solve_subgradient, SubgradientConfig};
    use bcgc::runtime::runtime_tau;
    use bcgc::simulator::{resolve_scheme, DrawSet, SchemeKind, SchemeSettings};
    use bcgc::{CodingProfile, ShiftedExponential, StragglerModel, SystemConfig, WorkerDraw};

    /// Iterations used by the in-browser subgradient solve.
    pub const DEMO_ITERS: usize = 4_000;

    pub const SCHEMES: [SchemeKind; 4] = [
        SchemeKind::Subgradient,
        SchemeKind::ClosedT,
        SchemeKind::ClosedF,
        SchemeKind::SingleBlock,
    ];

    fn setup(
        workers: usize,
        model_size: usize,
        mu: f64,
        t0: f64,
    ) -> Result<(SystemConfig, ShiftedExponential), String> {
        let cfg =
            SystemConfig::new(workers, model_size, workers, 1.0).map_err(|e| e.to_string())?;
        let dist = ShiftedExponential::new(mu, t0).map_err(|e| e.to_string())?;
        Ok((cfg, dist))
    }

    fn settings(seed: u64) -> SchemeSettings {
        let mut s = SchemeSettings::default().with_seed(seed);
        s.subgradient.max_iters = DEMO_ITERS;
        s
    }

    /// Relaxed `x_t`, `x_f` and subgradient allocations, concatenated (length `3N`).
    pub fn allocations(
        workers: usize,
        model_size: usize,
        mu: f64,
        t0: f64,
    ) -> Result<Vec<f64>, String> {
        let (cfg, dist) = setup(workers, model_size, mu, t0)?;
        let x_t =
            closed_form_t(&cfg, &dist.order_stat_means(workers)).map_err(|e| e.to_string())?;
        let t_harmonic = dist
            .order_stat_harmonic_means(workers)
            .map_err(|e| e.to_string())?;
        let x_f = closed_form_f(&cfg, &t_harmonic).map_err(|e| e.to_string())?;
        let sg = SubgradientConfig {
            max_iters: DEMO_ITERS,
            ..SubgradientConfig::default()
        };
        let opt = solve_subgradient(&cfg, &dist, &sg).map_err(|e| e.to_string())?;
        Ok(x_t
            .counts()
            .iter()
            .chain(x_f.counts())
            .chain(opt.allocation.counts())
            .copied()
            .collect())
    }

    /// `[mean, half-width]` per scheme in [`SCHEMES`] order, on one common draw set.
    pub fn compare(
        workers: usize,
        model_size: usize,
        mu: f64,
        t0: f64,
        draws: usize,
        seed: u64,
    ) -> Result<Vec<f64>, String> {
        if draws < 2 {
            return Err("need at least two draws".into());
        }
        let (cfg, dist) = setup(workers, model_size, mu, t0)?;
        let settings = settings(seed);
        let set = DrawSet::sample(&dist, workers, draws, seed ^ 0xd3);
        let mut out = Vec::with_capacity(2 * SCHEMES.len());
        for kind in SCHEMES {
            let scheme = resolve_scheme(kind, &cfg, &dist, &settings).map_err(|e| e.to_string())?;
            let est = set.estimate(scheme.allocation.counts(), cfg.time_scale());
            out.push(est.mean);
            out.push(est.half_width_95);
        }
        Ok(out)
    }

    fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, String> {
        text.split([',', ' '])
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|_| format!("bad {what} entry `{s}`")))
            .collect()
    }

    /// Runtime of a per-coordinate straggler-tolerance profile under fixed worker times.
    pub fn profile_runtime(
        levels: &str,
        times: &str,
        samples: usize,
        cycles: f64,
    ) -> Result<f64, String> {
        let times: Vec<f64> = parse_list(times, "time")?;
        let levels: Vec<usize> = parse_list(levels, "level")?;
        let n = times.len();
        let cfg = SystemConfig::new(n, levels.len().max(1), samples, cycles)
            .map_err(|e| e.to_string())?;
        let profile = CodingProfile::new(levels, n).map_err(|e| e.to_string())?;
        let draw = WorkerDraw::new(times).map_err(|e| e.to_string())?;
        runtime_tau(&profile, &draw, &cfg).map_err(|e| e.to_string())
    }
}

/// Relaxed `x_t`, `x_f` and optimized allocations, concatenated.
#[wasm_bindgen]
pub fn allocations(
    workers: usize,
    model_size: usize,
    mu: f64,
    t0: f64,
) -> Result<Vec<f64>, JsError> {
    demo::allocations(workers, model_size, mu, t0).map_err(|e| JsError::new(&e))
}

/// Mean runtime and 95% half-width for subgradient, closed-t, closed-f and single-block.
#[wasm_bindgen]
pub fn compare(
    workers: usize,
    model_size: usize,
    mu: f64,
    t0: f64,
    draws: usize,
    seed: u32,
) -> Result<Vec<f64>, JsError> {
    demo::compare(workers, model_size, mu, t0, draws, seed as u64).map_err(|e| JsError::new(&e))
}

/// Runtime of a comma-separated sorted level profile under comma-separated worker times.
#[wasm_bindgen]
pub fn profile_runtime(
    levels: &str,
    times: &str,
    samples: usize,
    cycles: f64,
) -> Result<f64, JsError> {
    demo::profile_runtime(levels, times, samples, cycles).map_err(|e| JsError::new(&e))
}
