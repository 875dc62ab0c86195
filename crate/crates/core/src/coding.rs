//! Sample allocation and per-level gradient codes with cyclic support.
//!
//! Worker `n` (0-based) holds the data subsets `n, n+1, ..., n+s_max` (mod
//! `N`). For a coordinate at level `s` it sends one linear combination of the
//! partial derivatives of its first `s+1` subsets. The row of coefficients is
//! the worker's row of a level-`s` [`CodeMatrix`]; the master decodes from
//! any `N - s` workers by solving `aᵀ B_A = 1ᵀ`.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::runtime::{CodingProfile, SystemConfig};
use crate::straggler::WorkerDraw;

/// Residual bound `‖aᵀB_A − 1ᵀ‖∞` for a successful decode.
pub const DECODE_TOLERANCE: f64 = 1e-10;

/// Above this many `(N - s)`-subsets the construction only checks a sample.
const EXHAUSTIVE_CHECK_LIMIT: usize = 4_096;
const SAMPLED_CHECKS: usize = 512;
const MAX_CONSTRUCTION_ATTEMPTS: usize = 32;

/// Which samples each data subset holds and which subsets each worker holds.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleAssignment {
    /// `subsets[i]` lists the sample indices of subset `i`.
    pub subsets: Vec<Vec<usize>>,
    /// `worker_subsets[n]` is `I_n`, starting at subset `n` and wrapping.
    pub worker_subsets: Vec<Vec<usize>>,
}

/// Partitions the `M` samples into `N` random subsets of size `M/N` and
/// gives worker `n` the `max_l s_l + 1` cyclically consecutive subsets
/// starting at `n`.
///
/// Worker speeds play no part here; the function never sees a draw.
pub fn allocate_samples(
    cfg: &SystemConfig,
    profile: &CodingProfile,
    rng: &mut dyn RngCore,
) -> Result<SampleAssignment> {
    let size = cfg.subset_size()?;
    let n = cfg.n_workers;
    if let Some(&s) = profile.levels().iter().find(|&&s| s >= n) {
        return Err(invalid(
            "profile",
            format!("tolerance {s} out of range for {n} workers"),
        ));
    }
    let mut order: Vec<usize> = (0..cfg.n_samples).collect();
    order.shuffle(rng);
    let subsets = order.chunks(size).map(|c| c.to_vec()).collect();
    let held = profile.max_level() + 1;
    let worker_subsets = (0..n)
        .map(|w| (0..held).map(|j| (w + j) % n).collect())
        .collect();
    Ok(SampleAssignment {
        subsets,
        worker_subsets,
    })
}

/// An `N × N` encoding matrix for straggler tolerance `level`.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeMatrix {
    level: usize,
    matrix: DMatrix<f64>,
}

impl CodeMatrix {
    /// Wraps explicit coefficients after checking the cyclic support and,
    /// for small `N`, decodability from every admissible worker set.
    pub fn from_rows(level: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if level >= n {
            return Err(invalid(
                "level",
                format!("level {level} out of range for {n} workers"),
            ));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                what: "code row entries",
                expected: n,
                actual: r.len(),
            });
        }
        let matrix = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        let code = Self { level, matrix };
        code.check_support()?;
        code.check_decodable(&mut ChaCha8Rng::seed_from_u64(0))?;
        Ok(code)
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn n_workers(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Coefficient of subset `subset` in worker `worker`'s combination.
    pub fn coefficient(&self, worker: usize, subset: usize) -> f64 {
        self.matrix[(worker, subset)]
    }

    /// Subsets worker `worker` combines: `worker, worker+1, ..., worker+level` mod `N`.
    pub fn support(&self, worker: usize) -> impl Iterator<Item = usize> + '_ {
        let n = self.n_workers();
        (0..=self.level).map(move |j| (worker + j) % n)
    }

    fn check_support(&self) -> Result<()> {
        let n = self.n_workers();
        for w in 0..n {
            let mut inside = vec![false; n];
            for j in self.support(w) {
                inside[j] = true;
            }
            for j in 0..n {
                let nonzero = self.matrix[(w, j)] != 0.0;
                if nonzero != inside[j] {
                    return Err(invalid(
                        "code",
                        format!(
                            "row {w} must be nonzero exactly on its {} cyclic positions",
                            self.level + 1
                        ),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Decodes from every `(N - s)`-subset of workers when there are few of
    /// them, otherwise from a random sample plus all cyclic windows.
    fn check_decodable(&self, rng: &mut dyn RngCore) -> Result<()> {
        let n = self.n_workers();
        let k = n - self.level;
        if binomial_at_most(n, k, EXHAUSTIVE_CHECK_LIMIT) {
            let mut result = Ok(());
            for_each_subset(n, k, &mut |active| {
                if result.is_ok() {
                    result = decode_coefficients(self, active).map(|_| ());
                }
            });
            result
        } else {
            for start in 0..n {
                let mut active: Vec<usize> = (0..k).map(|j| (start + j) % n).collect();
                active.sort_unstable();
                decode_coefficients(self, &active)?;
            }
            let mut all: Vec<usize> = (0..n).collect();
            for _ in 0..SAMPLED_CHECKS {
                all.shuffle(rng);
                let mut active = all[..k].to_vec();
                active.sort_unstable();
                decode_coefficients(self, &active)?;
            }
            Ok(())
        }
    }
}

/// Builds a level-`level` code for `n_workers` workers.
///
/// Draws a random `s × N` matrix `H` whose rows are orthogonal to `1`, then
/// gives each worker the unique row on its cyclic support that lies in the
/// null space of `H` with leading coefficient 1. Any `N - s` such rows span
/// `null(H)`, which contains `1`. The result is checked and redrawn on the
/// (probability zero) event of a rank failure. `level == 0` is the identity.
pub fn build_code_matrix(
    n_workers: usize,
    level: usize,
    rng: &mut dyn RngCore,
) -> Result<CodeMatrix> {
    if n_workers == 0 {
        return Err(invalid("workers", "need at least one worker"));
    }
    if level >= n_workers {
        return Err(invalid(
            "level",
            format!("level {level} out of range for {n_workers} workers"),
        ));
    }
    if level == 0 {
        return Ok(CodeMatrix {
            level,
            matrix: DMatrix::identity(n_workers, n_workers),
        });
    }
    let n = n_workers;
    let mut last_err = None;
    for _ in 0..MAX_CONSTRUCTION_ATTEMPTS {
        let mut h = DMatrix::<f64>::from_fn(level, n, |_, _| rng.sample(StandardNormal));
        for mut row in h.row_iter_mut() {
            let mean = row.mean();
            row.add_scalar_mut(-mean);
        }
        let mut matrix = DMatrix::<f64>::zeros(n, n);
        let mut ok = true;
        for w in 0..n {
            let support: Vec<usize> = (0..=level).map(|j| (w + j) % n).collect();
            let lhs = DMatrix::from_fn(level, level, |r, c| h[(r, support[c + 1])]);
            let rhs = DVector::from_fn(level, |r, _| -h[(r, support[0])]);
            let Some(tail) = lhs.lu().solve(&rhs) else {
                ok = false;
                break;
            };
            matrix[(w, support[0])] = 1.0;
            for (c, &j) in support[1..].iter().enumerate() {
                matrix[(w, j)] = tail[c];
            }
        }
        if !ok {
            continue;
        }
        let code = CodeMatrix { level, matrix };
        match code.check_support().and_then(|_| code.check_decodable(rng)) {
            Ok(()) => return Ok(code),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or(Error::Undecodable {
        level,
        active: n - level,
        residual: f64::INFINITY,
    }))
}

/// Coefficients `a` (aligned with `active`) such that `aᵀ B_active = 1ᵀ`.
pub fn decode_coefficients(code: &CodeMatrix, active: &[usize]) -> Result<Vec<f64>> {
    let n = code.n_workers();
    let needed = n - code.level;
    if active.len() < needed {
        return Err(Error::Undecodable {
            level: code.level,
            active: active.len(),
            residual: f64::INFINITY,
        });
    }
    if let Some(&w) = active.iter().find(|&&w| w >= n) {
        return Err(invalid("active", format!("worker {w} out of range")));
    }
    // Any N - s rows of a valid code are independent and already have 1ᵀ in
    // their span, so the first N - s active workers suffice; the rest get 0.
    let basis = &active[..needed];
    let lhs = DMatrix::from_fn(n, needed, |j, k| code.matrix[(basis[k], j)]);
    let ones = DVector::from_element(n, 1.0);
    let qr = lhs.clone().qr();
    let rhs = qr.q().transpose() * &ones;
    let a = qr
        .r()
        .solve_upper_triangular(&rhs)
        .ok_or(Error::Undecodable {
            level: code.level,
            active: active.len(),
            residual: f64::INFINITY,
        })?;
    let residual = (&lhs * &a - ones).amax();
    if !(residual <= DECODE_TOLERANCE) {
        return Err(Error::Undecodable {
            level: code.level,
            active: active.len(),
            residual,
        });
    }
    let mut coeffs = vec![0.0; active.len()];
    coeffs[..needed].copy_from_slice(a.as_slice());
    Ok(coeffs)
}

/// The codes used by a profile, one per distinct level, plus a decode cache
/// keyed by `(level, sorted active workers)`.
#[derive(Debug)]
pub struct BlockCode {
    n_workers: usize,
    codes: Vec<Option<Arc<CodeMatrix>>>,
    cache: RwLock<HashMap<(usize, Vec<usize>), Arc<Vec<f64>>>>,
}

impl BlockCode {
    /// Builds one code per level present in `profile`.
    pub fn for_profile(
        n_workers: usize,
        profile: &CodingProfile,
        rng: &mut dyn RngCore,
    ) -> Result<Self> {
        let mut codes = vec![None; n_workers];
        for &s in profile.levels() {
            if s >= n_workers {
                return Err(invalid(
                    "profile",
                    format!("tolerance {s} out of range for {n_workers} workers"),
                ));
            }
            if codes[s].is_none() {
                codes[s] = Some(Arc::new(build_code_matrix(n_workers, s, rng)?));
            }
        }
        Ok(Self::from_codes(n_workers, codes))
    }

    /// Uses the given matrices, one per level.
    pub fn from_matrices(n_workers: usize, matrices: Vec<CodeMatrix>) -> Result<Self> {
        let mut codes = vec![None; n_workers];
        for m in matrices {
            if m.n_workers() != n_workers {
                return Err(Error::DimensionMismatch {
                    what: "code rows",
                    expected: n_workers,
                    actual: m.n_workers(),
                });
            }
            let level = m.level;
            codes[level] = Some(Arc::new(m));
        }
        Ok(Self::from_codes(n_workers, codes))
    }

    fn from_codes(n_workers: usize, codes: Vec<Option<Arc<CodeMatrix>>>) -> Self {
        Self {
            n_workers,
            codes,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn n_workers(&self) -> usize {
        self.n_workers
    }

    pub fn code(&self, level: usize) -> Option<&CodeMatrix> {
        self.codes.get(level).and_then(|c| c.as_deref())
    }

    fn code_or_err(&self, level: usize) -> Result<&CodeMatrix> {
        self.code(level)
            .ok_or_else(|| invalid("level", format!("no code built for level {level}")))
    }

    /// Decoding coefficients for a sorted active set, memoized.
    pub fn decode(&self, level: usize, active: &[usize]) -> Result<Arc<Vec<f64>>> {
        let key = (level, active.to_vec());
        if let Some(hit) = self.cache.read().expect("decode cache poisoned").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let coeffs = Arc::new(decode_coefficients(self.code_or_err(level)?, active)?);
        self.cache
            .write()
            .expect("decode cache poisoned")
            .entry(key)
            .or_insert_with(|| Arc::clone(&coeffs));
        Ok(coeffs)
    }

    pub fn cached_decodes(&self) -> usize {
        self.cache.read().expect("decode cache poisoned").len()
    }
}

/// Coded partial derivatives produced by the workers in one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientWorkspace {
    /// `coded[n][l]` is worker `n`'s `l`-th coded partial derivative.
    coded: Vec<Vec<f64>>,
}

impl GradientWorkspace {
    /// Each worker encodes the per-subset partial derivatives it holds.
    ///
    /// `partials[i][l]` is `∂F(D_i; θ)/∂θ_l`. A worker only touches subsets
    /// in its assignment.
    pub fn encode(
        code: &BlockCode,
        profile: &CodingProfile,
        assignment: &SampleAssignment,
        partials: &[Vec<f64>],
    ) -> Result<Self> {
        let n = code.n_workers();
        if partials.len() != n || assignment.worker_subsets.len() != n {
            return Err(Error::DimensionMismatch {
                what: "subsets",
                expected: n,
                actual: partials.len(),
            });
        }
        let l = profile.len();
        if let Some(p) = partials.iter().find(|p| p.len() != l) {
            return Err(Error::DimensionMismatch {
                what: "coordinates",
                expected: l,
                actual: p.len(),
            });
        }
        let mut coded = vec![vec![0.0; l]; n];
        for (w, row) in coded.iter_mut().enumerate() {
            let held = &assignment.worker_subsets[w];
            for (coord, &s) in profile.levels().iter().enumerate() {
                let m = code.code_or_err(s)?;
                let mut acc = 0.0;
                for subset in m.support(w) {
                    if !held.contains(&subset) {
                        return Err(invalid(
                            "assignment",
                            format!("worker {w} does not hold subset {subset}"),
                        ));
                    }
                    acc += m.coefficient(w, subset) * partials[subset][coord];
                }
                row[coord] = acc;
            }
        }
        Ok(Self { coded })
    }

    pub fn coded(&self) -> &[Vec<f64>] {
        &self.coded
    }
}

/// When each worker's `l`-th coded value reaches the master; `∞` means never.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalSchedule {
    times: Vec<Vec<f64>>,
}

impl ArrivalSchedule {
    /// Sequential computation: worker `n` finishes coordinate `l` at
    /// `(M/N) b T_n Σ_{i<=l} (s_i + 1)`.
    pub fn sequential(
        cfg: &SystemConfig,
        profile: &CodingProfile,
        draw: &WorkerDraw,
    ) -> Result<Self> {
        if draw.len() != cfg.n_workers {
            return Err(Error::DimensionMismatch {
                what: "worker times",
                expected: cfg.n_workers,
                actual: draw.len(),
            });
        }
        let scale = cfg.time_scale();
        let times = draw
            .times()
            .iter()
            .map(|&t| {
                let mut work = 0u64;
                profile
                    .levels()
                    .iter()
                    .map(|&s| {
                        work += s as u64 + 1;
                        scale * t * work as f64
                    })
                    .collect()
            })
            .collect();
        Ok(Self { times })
    }

    pub fn from_times(times: Vec<Vec<f64>>) -> Self {
        Self { times }
    }

    /// Marks `worker` as never delivering anything.
    pub fn without_worker(mut self, worker: usize) -> Self {
        for t in self.times[worker].iter_mut() {
            *t = f64::INFINITY;
        }
        self
    }

    /// Drops a single coded value.
    pub fn without_value(mut self, worker: usize, coordinate: usize) -> Self {
        self.times[worker][coordinate] = f64::INFINITY;
        self
    }

    pub fn time(&self, worker: usize, coordinate: usize) -> f64 {
        self.times[worker][coordinate]
    }
}

/// The decoded gradient and, per coordinate, when and from whom it was decoded.
#[derive(Debug, Clone, PartialEq)]
pub struct Recovery {
    pub gradient: Vec<f64>,
    pub recovery_times: Vec<f64>,
    pub decoders: Vec<Vec<usize>>,
}

impl Recovery {
    /// Time at which the whole gradient is available.
    pub fn completion_time(&self) -> f64 {
        self.recovery_times.iter().copied().fold(0.0, f64::max)
    }
}

/// Decodes each coordinate from the first `N - s_l` arrivals (ties broken
/// by worker index).
pub fn recover_gradient(
    workspace: &GradientWorkspace,
    code: &BlockCode,
    profile: &CodingProfile,
    arrivals: &ArrivalSchedule,
) -> Result<Recovery> {
    let n = code.n_workers();
    let l = profile.len();
    let mut gradient = vec![0.0; l];
    let mut recovery_times = vec![0.0; l];
    let mut decoders = Vec::with_capacity(l);
    let mut order: Vec<usize> = (0..n).collect();
    for (coord, &s) in profile.levels().iter().enumerate() {
        let needed = n - s;
        order.sort_by(|&a, &b| {
            arrivals
                .time(a, coord)
                .total_cmp(&arrivals.time(b, coord))
                .then(a.cmp(&b))
        });
        let received = order
            .iter()
            .take_while(|&&w| arrivals.time(w, coord).is_finite())
            .count();
        if received < needed {
            return Err(Error::InsufficientArrivals {
                coordinate: coord,
                received,
                needed,
            });
        }
        let mut active = order[..needed].to_vec();
        recovery_times[coord] = arrivals.time(active[needed - 1], coord);
        active.sort_unstable();
        let coeffs = code.decode(s, &active)?;
        gradient[coord] = active
            .iter()
            .zip(coeffs.iter())
            .map(|(&w, &a)| a * workspace.coded[w][coord])
            .sum();
        decoders.push(active);
    }
    Ok(Recovery {
        gradient,
        recovery_times,
        decoders,
    })
}

/// Calls `f` on every `k`-subset of `0..n` in lexicographic order.
pub fn for_each_subset(n: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return;
    }
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn binomial_at_most(n: usize, k: usize, limit: usize) -> bool {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
        if c > limit as u128 {
            return false;
        }
    }
    true
}

/// The two level-1 and level-2 codes for four workers shown in the
/// motivating example: `c1 = g1 − g2`, `c2 = g2 + g3`, `c3 = g3 − g4`,
/// `c4 = g1 + g4` and the matching level-2 rows.
pub fn example_codes() -> (CodeMatrix, CodeMatrix) {
    let level1 = CodeMatrix::from_rows(
        1,
        &[
            vec![1.0, -1.0, 0.0, 0.0],
            vec![0.0, 1.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0, -1.0],
            vec![1.0, 0.0, 0.0, 1.0],
        ],
    )
    .expect("level-1 example code is valid");
    let level2 = CodeMatrix::from_rows(
        2,
        &[
            vec![1.0, 1.0 / 3.0, 2.0 / 3.0, 0.0],
            vec![0.0, 1.0, 0.5, 1.5],
            vec![2.0, 0.0, 1.0, -1.0],
            vec![-0.5, 0.5, 0.0, 1.0],
        ],
    )
    .expect("level-2 example code is valid");
    (level1, level2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(17)
    }

    #[test]
    fn cyclic_sample_allocation() {
        let cfg = SystemConfig::new(4, 4, 8, 1.0).unwrap();
        let p = CodingProfile::new(vec![0, 1, 1, 1], 4).unwrap();
        let a = allocate_samples(&cfg, &p, &mut rng()).unwrap();
        assert_eq!(a.worker_subsets[0], vec![0, 1]);
        assert_eq!(a.worker_subsets[3], vec![3, 0]);
        let mut all: Vec<usize> = a.subsets.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..8).collect::<Vec<_>>());
        assert!(a.subsets.iter().all(|s| s.len() == 2));

        let full = CodingProfile::new(vec![3, 3, 3, 3], 4).unwrap();
        let a = allocate_samples(&cfg, &full, &mut rng()).unwrap();
        assert!(a.worker_subsets.iter().all(|s| s.len() == 4));

        let none = CodingProfile::new(vec![0; 4], 4).unwrap();
        let a = allocate_samples(&cfg, &none, &mut rng()).unwrap();
        assert_eq!(a.worker_subsets, vec![vec![0], vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn allocation_requires_even_split() {
        let cfg = SystemConfig::new(4, 4, 10, 1.0).unwrap();
        let p = CodingProfile::new(vec![0; 4], 4).unwrap();
        assert!(matches!(
            allocate_samples(&cfg, &p, &mut rng()),
            Err(Error::Indivisible { .. })
        ));
    }

    #[test]
    fn example_code_decodes() {
        let (c1, c2) = example_codes();
        let a = decode_coefficients(&c1, &[0, 1, 2]).unwrap();
        for (got, want) in a.iter().zip([1.0, 2.0, -1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        let a = decode_coefficients(&c2, &[0, 1]).unwrap();
        for (got, want) in a.iter().zip([1.0, 2.0 / 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn level_zero_is_identity() {
        let c = build_code_matrix(5, 0, &mut rng()).unwrap();
        assert_eq!(c.matrix(), &DMatrix::<f64>::identity(5, 5));
        let a = decode_coefficients(&c, &[0, 1, 2, 3, 4]).unwrap();
        assert!(a.iter().all(|&v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn built_codes_have_cyclic_support() {
        for n in 1..=9 {
            for s in 0..n {
                let c = build_code_matrix(n, s, &mut rng()).unwrap();
                for w in 0..n {
                    let nnz = (0..n).filter(|&j| c.coefficient(w, j) != 0.0).count();
                    assert_eq!(nnz, s + 1);
                    assert!(c.support(w).all(|j| c.coefficient(w, j) != 0.0));
                }
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(build_code_matrix(4, 4, &mut rng()).is_err());
        let (c1, _) = example_codes();
        assert!(matches!(
            decode_coefficients(&c1, &[0, 1]),
            Err(Error::Undecodable { .. })
        ));
        // wrong support pattern
        assert!(CodeMatrix::from_rows(1, &[vec![1.0, 1.0], vec![1.0, 0.0]]).is_err());
        // right support, but rows are parallel: not decodable from one worker
        assert!(CodeMatrix::from_rows(1, &[vec![1.0, 2.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn subsets_enumeration() {
        let mut count = 0;
        for_each_subset(6, 3, &mut |s| {
            assert!(s.windows(2).all(|w| w[0] < w[1]));
            count += 1;
        });
        assert_eq!(count, 20);
        assert!(binomial_at_most(10, 5, 252));
        assert!(!binomial_at_most(10, 5, 251));
    }

    #[test]
    fn decode_cache_reuses_solutions() {
        let p = CodingProfile::new(vec![1, 1, 2], 4).unwrap();
        let code = BlockCode::for_profile(4, &p, &mut rng()).unwrap();
        let a = code.decode(1, &[0, 1, 3]).unwrap();
        let b = code.decode(1, &[0, 1, 3]).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(code.cached_decodes(), 1);
        assert!(code.decode(3, &[0]).is_err());
    }
}
