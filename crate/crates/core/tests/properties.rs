use bcgc::coding::{
    allocate_samples, build_code_matrix, decode_coefficients, for_each_subset, recover_gradient,
    ArrivalSchedule, BlockCode, GradientWorkspace, DECODE_TOLERANCE,
};
use bcgc::optimizer::{closed_form_t, equalized_level, project_onto_feasible};
use bcgc::runtime::{runtime_tau, runtime_tau_hat, s_to_x, tau_hat_sorted, x_to_s};
use bcgc::simulator::LeastSquares;
use bcgc::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sorted_profile() -> impl Strategy<Value = (usize, Vec<usize>)> {
    (1usize..=16).prop_flat_map(|n| {
        (Just(n), prop::collection::vec(0..n, 1..=64)).prop_map(|(n, mut s)| {
            s.sort_unstable();
            (n, s)
        })
    })
}

fn draw_for(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..100.0, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn tau_equals_tau_hat((n, s) in sorted_profile(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = ShiftedExponential::new(0.7, 0.2).unwrap();
        let draw = d.sample_draw(n, &mut rng);
        let cfg = SystemConfig::new(n, s.len(), 3 * n, 1.5).unwrap();
        let profile = CodingProfile::new(s, n).unwrap();
        let x = s_to_x(&profile, n).unwrap();
        let a = runtime_tau(&profile, &draw, &cfg).unwrap();
        let b = runtime_tau_hat(&x, &draw, &cfg).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs());
    }

    #[test]
    fn change_of_variables_round_trip(counts in prop::collection::vec(0usize..20, 1..12)) {
        let l: usize = counts.iter().sum();
        prop_assume!(l > 0);
        let x = BlockAllocation::integer(counts.clone(), l).unwrap();
        let s = x_to_s(&x).unwrap();
        prop_assert!(s.is_sorted());
        prop_assert_eq!(s_to_x(&s, counts.len()).unwrap(), x);
    }

    #[test]
    fn lowering_a_descent_never_hurts(
        n in 2usize..10,
        raw in prop::collection::vec(0usize..100, 2..40),
        times in prop::collection::vec(0.1f64..10.0, 10),
    ) {
        let s: Vec<usize> = raw.iter().map(|v| v % n).collect();
        let cfg = SystemConfig::new(n, s.len(), n, 1.0).unwrap();
        let draw = WorkerDraw::new(times[..n].to_vec()).unwrap();
        let before = runtime_tau(&CodingProfile::new(s.clone(), n).unwrap(), &draw, &cfg).unwrap();
        for k in 0..s.len() - 1 {
            if s[k] > s[k + 1] {
                let mut lowered = s.clone();
                lowered[k] = s[k + 1];
                let after = runtime_tau(&CodingProfile::new(lowered, n).unwrap(), &draw, &cfg).unwrap();
                prop_assert!(after <= before);
            }
        }
    }

    #[test]
    fn tau_hat_midpoint_convex(
        n in 1usize..12,
        a in prop::collection::vec(0.0f64..1.0, 12),
        b in prop::collection::vec(0.0f64..1.0, 12),
        t in draw_for(12),
    ) {
        let l = 50.0;
        let norm = |v: &[f64]| {
            let s: f64 = v.iter().sum::<f64>() + 1e-9;
            v.iter().map(|x| (x + 1e-9 / n as f64) * l / s).collect::<Vec<_>>()
        };
        let (x, y) = (norm(&a[..n]), norm(&b[..n]));
        let mid: Vec<f64> = x.iter().zip(&y).map(|(p, q)| 0.5 * (p + q)).collect();
        let mut sorted = t[..n].to_vec();
        sorted.sort_by(f64::total_cmp);
        let f = |v: &[f64]| tau_hat_sorted(v, &sorted);
        prop_assert!(f(&mid) <= 0.5 * (f(&x) + f(&y)) * (1.0 + 1e-12));
    }

    #[test]
    fn projection_is_feasible_and_idempotent(v in prop::collection::vec(-1e3f64..1e3, 1..40), total in 1.0f64..1e5) {
        let p = project_onto_feasible(&v, total);
        prop_assert!(p.iter().all(|&x| x >= 0.0));
        let sum: f64 = p.iter().sum();
        prop_assert!((sum - total).abs() <= 1e-10 * total);
        let q = project_onto_feasible(&p, total);
        for (a, b) in p.iter().zip(&q) {
            prop_assert!((a - b).abs() <= 1e-9 * total);
        }
        // Optimality: no feasible point on a random ray is closer to v.
        let dist = |x: &[f64]| x.iter().zip(&v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        let uniform = vec![total / v.len() as f64; v.len()];
        prop_assert!(dist(&p) <= dist(&uniform) + 1e-6 * total * total);
    }

    #[test]
    fn closed_form_lower_bound(
        n in 2usize..30,
        gaps in prop::collection::vec(0.0f64..5.0, 30),
        w in prop::collection::vec(0.0f64..1.0, 30),
    ) {
        let mut t = Vec::with_capacity(n);
        let mut acc = 0.5;
        for g in &gaps[..n] {
            acc += g;
            t.push(acc);
        }
        let cfg = SystemConfig::new(n, 1000, n, 1.0).unwrap();
        let m = equalized_level(&cfg, &t);
        let xt = closed_form_t(&cfg, &t).unwrap();
        prop_assert!((tau_hat_sorted(xt.counts(), &t) - m).abs() <= 1e-9 * m);
        let s: f64 = w[..n].iter().sum::<f64>() + 1e-12;
        let x: Vec<f64> = w[..n].iter().map(|v| (v + 1e-12 / n as f64) * 1000.0 / s).collect();
        prop_assert!(tau_hat_sorted(&x, &t) >= m * (1.0 - 1e-12));
    }
}

#[test]
fn every_straggler_pattern_decodes() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for n in 1..=8 {
        for s in 0..n {
            let code = build_code_matrix(n, s, &mut rng).unwrap();
            for size in n - s..=n {
                for_each_subset(n, size, &mut |active| {
                    let a = decode_coefficients(&code, active)
                        .unwrap_or_else(|e| panic!("N={n} s={s} {active:?}: {e}"));
                    for j in 0..n {
                        let v: f64 = active
                            .iter()
                            .zip(&a)
                            .map(|(&w, c)| c * code.coefficient(w, j))
                            .sum();
                        assert!((v - 1.0).abs() <= DECODE_TOLERANCE);
                    }
                });
            }
        }
    }
}

#[test]
fn coded_gradient_is_exact_under_random_stragglers() {
    let (n, m, l) = (8, 64, 32);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cfg = SystemConfig::new(n, l, m, 1.0).unwrap();
    let levels: Vec<usize> = (0..l).map(|i| i * n / l).collect();
    let profile = CodingProfile::new(levels, n).unwrap();
    let ds = LeastSquares::synthetic(m, l, 11);
    let theta: Vec<f64> = (0..l).map(|i| (i as f64 * 0.37).sin()).collect();
    let assignment = allocate_samples(&cfg, &profile, &mut rng).unwrap();
    let code = BlockCode::for_profile(n, &profile, &mut rng).unwrap();
    let partials: Vec<Vec<f64>> = assignment
        .subsets
        .iter()
        .map(|s| ds.partial_gradient(s, &theta))
        .collect();
    let ws = GradientWorkspace::encode(&code, &profile, &assignment, &partials).unwrap();
    let central = ds.gradient(&theta);
    let d = ShiftedExponential::new(1.0, 0.5).unwrap();
    for trial in 0..100 {
        let draw = d.sample_draw(n, &mut rng);
        let mut arrivals = ArrivalSchedule::sequential(&cfg, &profile, &draw).unwrap();
        // knock out up to s_l values per coordinate at random workers
        for (coord, &s) in profile.levels().iter().enumerate() {
            let mut workers: Vec<usize> = (0..n).collect();
            rand::seq::SliceRandom::shuffle(workers.as_mut_slice(), &mut rng);
            for &w in workers.iter().take(s) {
                arrivals = arrivals.without_value(w, coord);
            }
        }
        let rec = recover_gradient(&ws, &code, &profile, &arrivals).unwrap();
        for (a, b) in rec.gradient.iter().zip(&central) {
            assert!(
                (a - b).abs() <= 1e-9 * b.abs().max(1.0),
                "trial {trial}: {a} vs {b}"
            );
        }
    }
}

#[test]
fn example_schedule_recovery_time() {
    // N=4, s=(1,1,2,2), T=(0.1,0.1,0.25,1): coordinate 4 comes from workers 1,2 at Mb/4.
    let cfg = SystemConfig::new(4, 4, 4, 1.0).unwrap();
    let profile = CodingProfile::new(vec![1, 1, 2, 2], 4).unwrap();
    let (c1, c2) = bcgc::coding::example_codes();
    let code = BlockCode::from_matrices(4, vec![c1, c2]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let assignment = allocate_samples(&cfg, &profile, &mut rng).unwrap();
    let partials: Vec<Vec<f64>> = (0..4)
        .map(|i| (0..4).map(|l| (i * 4 + l) as f64).collect())
        .collect();
    let ws = GradientWorkspace::encode(&code, &profile, &assignment, &partials).unwrap();
    let draw = WorkerDraw::new(vec![0.1, 0.1, 0.25, 1.0]).unwrap();
    let arrivals = ArrivalSchedule::sequential(&cfg, &profile, &draw).unwrap();
    let rec = recover_gradient(&ws, &code, &profile, &arrivals).unwrap();
    assert_eq!(rec.decoders[3], vec![0, 1]);
    assert!((rec.recovery_times[3] - 4.0 * 1.0 * 10.0 / 4.0 * 0.1).abs() < 1e-12);
    assert_eq!(
        rec.completion_time(),
        runtime_tau(&profile, &draw, &cfg).unwrap()
    );
    for l in 0..4 {
        let want: f64 = (0..4).map(|i| partials[i][l]).sum();
        assert!((rec.gradient[l] - want).abs() < 1e-12);
    }
    // a worker that never reports is tolerated at every level >= 1
    let rec = recover_gradient(&ws, &code, &profile, &arrivals.clone().without_worker(3)).unwrap();
    assert!((rec.gradient[0] - (0..4).map(|i| partials[i][0]).sum::<f64>()).abs() < 1e-12);
    // but two silent workers break the level-1 coordinates
    let err = recover_gradient(
        &ws,
        &code,
        &profile,
        &arrivals.without_worker(3).without_worker(2),
    );
    assert!(matches!(
        err,
        Err(Error::InsufficientArrivals { coordinate: 0, .. })
    ));
}
