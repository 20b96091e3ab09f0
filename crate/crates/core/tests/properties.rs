use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use swarm_anneal::density::{self, DensityParams};
use swarm_anneal::dynamics::{Snapshot, Trajectory};
use swarm_anneal::experiments::{aggregate_heatmap, median_min_u_curve, Bins};
use swarm_anneal::normalization::{estimate_c_from_values, weighted_defect, CSolver};
use swarm_anneal::potentials::{DoubleWell, Potential, SixHumpCamel, DOUBLE_WELL_KNOTS};
use swarm_anneal::scalar_math::{lambert_w0, lambert_w0_exp};
use swarm_anneal::schedule::CoolingSchedule;
use swarm_anneal::transport::{barycentric_velocity, solve_discrete_ot, DEFAULT_OT_TOLERANCE};
use swarm_anneal::Points;

fn params() -> impl Strategy<Value = DensityParams> {
    (1.01f64..8.0, 0.05f64..50.0, -1.0f64..3.0).prop_map(|(m, beta, c)| DensityParams::new(m, beta, c))
}

fn schedule() -> impl Strategy<Value = CoolingSchedule> {
    prop_oneof![
        (0.1f64..5.0).prop_map(CoolingSchedule::constant),
        (0.1f64..5.0, 0.0f64..50.0).prop_map(|(b, r)| CoolingSchedule::linear(b, r)),
        (0.1f64..5.0, 0.0f64..50.0).prop_map(|(b, r)| CoolingSchedule::quadratic(b, r)),
        (0.1f64..5.0, 0.0f64..50.0, 1u32..5).prop_map(|(b, r, p)| CoolingSchedule::polynomial(b, r, p)),
    ]
}

/// Random trajectories sharing one snapshot grid, with `min_u` built as
/// running minima of arbitrary per-step values.
fn trajectories(seed: u64, runs: usize, snaps: usize, n: usize, dim: usize) -> Vec<Trajectory> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..runs)
        .map(|_| {
            let mut min_u = vec![f64::INFINITY; n];
            let snapshots = (0..snaps)
                .map(|s| {
                    for mu in &mut min_u {
                        *mu = mu.min(rng.random_range(0.0..10.0));
                    }
                    Snapshot {
                        t: 0.01 * s as f64,
                        positions: Points::new(dim, (0..n * dim).map(|_| rng.random_range(-10.0..10.0)).collect()),
                        c: f64::NAN,
                        plan_cost: f64::NAN,
                        ess: f64::NAN,
                        min_u: min_u.clone(),
                    }
                })
                .collect();
            Trajectory { snapshots }
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lambert_residual(x in 1e-8f64..1e8) {
        let w = lambert_w0(x).unwrap();
        prop_assert!((w * w.exp() - x).abs() / x.max(1.0) <= 1e-12);
    }

    #[test]
    fn lambert_log_form_agrees(z in -700.0f64..700.0) {
        let a = lambert_w0_exp(z).unwrap();
        let b = lambert_w0(z.exp()).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * b);
    }

    #[test]
    fn schedule_derivative_matches_central_difference(s in schedule(), t in 0.01f64..2.0) {
        let h = 1e-6;
        let fd = (s.beta(t + h).unwrap() - s.beta(t - h).unwrap()) / (2.0 * h);
        let d = s.beta_prime(t).unwrap();
        prop_assert!((fd - d).abs() <= 1e-6 * d.abs().max(1.0), "{fd} vs {d}");
    }

    #[test]
    fn double_well_gradient_and_sign(x in -8.0f64..8.0) {
        prop_assume!(DOUBLE_WELL_KNOTS.iter().all(|k| (x - k).abs() > 1e-4));
        prop_assert!(DoubleWell.value(&[x]) >= 0.0);
        let h = 1e-6;
        let fd = (DoubleWell.value(&[x + h]) - DoubleWell.value(&[x - h])) / (2.0 * h);
        let mut g = [0.0];
        DoubleWell.grad(&[x], &mut g);
        prop_assert!((g[0] - fd).abs() <= 1e-5 * g[0].abs().max(1.0));
    }

    #[test]
    fn camel_gradient_and_lower_bound(x1 in -3.0f64..3.0, x2 in -2.0f64..2.0) {
        // the true minimum of the unshifted function is -1.0316284535
        prop_assert!(SixHumpCamel.value(&[x1, x2]) >= 1.0316 - 1.031_628_453_6);
        let h = 1e-6;
        let mut g = [0.0; 2];
        SixHumpCamel.grad(&[x1, x2], &mut g);
        let fd = [
            (SixHumpCamel.value(&[x1 + h, x2]) - SixHumpCamel.value(&[x1 - h, x2])) / (2.0 * h),
            (SixHumpCamel.value(&[x1, x2 + h]) - SixHumpCamel.value(&[x1, x2 - h])) / (2.0 * h),
        ];
        for j in 0..2 {
            prop_assert!((g[j] - fd[j]).abs() <= 1e-5 * g[j].abs().max(1.0));
        }
    }

    #[test]
    fn density_is_monotone_and_bounded(p in params(), s in -5.0f64..20.0, ds in 1e-3f64..5.0) {
        // beyond (m-1) beta (u - C) ~ 36 the Lambert value drops below one ulp
        // of 1 and a rounds to exactly 1
        let scale = 1.0 / ((p.m - 1.0) * p.beta);
        let (u1, u2) = (p.c + s * scale, p.c + (s + ds) * scale);
        prop_assert!(density::rho(&p, u1) > density::rho(&p, u2));
        prop_assert!(density::weight_a(&p, u1) < density::weight_a(&p, u2));
        let bound = |u: f64| (p.m / (p.m - 1.0) - p.beta * (u - p.c)).exp();
        prop_assert!(density::rho(&p, u1) <= bound(u1) * (1.0 + 1e-12));
        let floor = 1.0 / (1.0 + lambert_w0_exp(p.m.ln() + p.m + (p.m - 1.0) * p.beta * p.c).unwrap());
        prop_assert!(density::weight_a(&p, u1.max(0.0)) >= floor);
    }

    #[test]
    fn normalization_root_is_bracketed(p in params(), seed in any::<u64>(), n in 1usize..200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let us: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..20.0)).collect();
        let w = vec![1.0 / n as f64; n];
        let u_max = us.iter().copied().fold(0.0, f64::max);
        prop_assert!(weighted_defect(&us, &w, &p, 0.0) <= 1e-12);
        prop_assert!(weighted_defect(&us, &w, &p, u_max) >= -1e-12);
        let solver = CSolver::default();
        let (c, residual) = estimate_c_from_values(&us, &p, &solver, None).unwrap();
        prop_assert!(residual.abs() <= solver.tol);
        prop_assert!((weighted_defect(&us, &w, &p, c) - residual).abs() < 1e-12);
    }

    #[test]
    fn transport_plans_are_feasible(seed in any::<u64>(), n in 1usize..40, d in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = Points::new(d, (0..n * d).map(|_| rng.random_range(-5.0..5.0)).collect());
        let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>().powi(4)).collect();
        let s: f64 = raw.iter().sum();
        prop_assume!(s > 0.0);
        let w: Vec<f64> = raw.iter().map(|x| x / s).collect();
        let plan = solve_discrete_ot(&pts, &w, DEFAULT_OT_TOLERANCE).unwrap();
        prop_assert!(plan.g.iter().all(|&g| g >= 0.0));
        prop_assert!(plan.row_sums().iter().all(|r| (r - 1.0).abs() <= 1e-9));
        prop_assert!(plan.marginal_error(&w) <= 1e-9);
    }

    #[test]
    fn uniform_weights_give_zero_motion(seed in any::<u64>(), n in 1usize..60, d in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = Points::new(d, (0..n * d).map(|_| rng.random_range(-5.0..5.0)).collect());
        let w = vec![1.0 / n as f64; n];
        let plan = solve_discrete_ot(&pts, &w, DEFAULT_OT_TOLERANCE).unwrap();
        prop_assert!(plan.cost.abs() < 1e-12);
        let v = barycentric_velocity(&plan, &pts, 0.04).unwrap();
        prop_assert!(v.as_slice().iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn heatmap_conserves_mass(
        seed in any::<u64>(), runs in 1usize..5, snaps in 1usize..8, n in 1usize..7, t_bins in 1usize..10, x_bins in 1usize..20,
    ) {
        let trajs = trajectories(seed, runs, snaps, n, 2);
        let bins = Bins::new(-5.0, 5.0, x_bins).unwrap();
        for axis in 0..2 {
            let h = aggregate_heatmap(&trajs, axis, t_bins, bins).unwrap();
            prop_assert_eq!(h.counts.len(), t_bins);
            for row in &h.counts {
                prop_assert_eq!(row.iter().sum::<u64>(), (runs * n) as u64);
            }
        }
    }

    #[test]
    fn min_u_curve_is_nonincreasing(seed in any::<u64>(), runs in 1usize..6, snaps in 1usize..10, n in 1usize..7) {
        let trajs = trajectories(seed, runs, snaps, n, 1);
        for subset in 1..=n {
            let curve = median_min_u_curve(&trajs, subset).unwrap();
            prop_assert_eq!(curve.len(), snaps);
            for w in curve.windows(2) {
                prop_assert!(w[1].1 <= w[0].1);
            }
        }
    }

    #[test]
    fn aggregates_ignore_run_order(seed in any::<u64>(), runs in 2usize..6, snaps in 1usize..6, n in 1usize..5, shift in 1usize..5) {
        let trajs = trajectories(seed, runs, snaps, n, 1);
        let mut rotated = trajs.clone();
        rotated.rotate_left(shift % runs);
        rotated.reverse();
        let bins = Bins::new(-10.0, 10.0, 16).unwrap();
        prop_assert_eq!(
            aggregate_heatmap(&trajs, 0, 4, bins).unwrap().counts,
            aggregate_heatmap(&rotated, 0, 4, bins).unwrap().counts
        );
        prop_assert_eq!(median_min_u_curve(&trajs, n).unwrap(), median_min_u_curve(&rotated, n).unwrap());
    }
}
