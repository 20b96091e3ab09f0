mod common;

use common::brute_force_ot_cost;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use swarm_anneal::transport::{barycentric_velocity, solve_discrete_ot, DEFAULT_OT_TOLERANCE};
use swarm_anneal::Points;

fn random_instance(rng: &mut ChaCha8Rng, n: usize, d: usize) -> (Points, Vec<f64>) {
    let pts = Points::new(d, (0..n * d).map(|_| rng.random_range(-2.0..2.0)).collect());
    // rational weights k_j / K with some zeros
    let ks: Vec<u32> = (0..n).map(|_| rng.random_range(0..4)).collect();
    let mut ks = ks;
    if ks.iter().all(|&k| k == 0) {
        ks[0] = 1;
    }
    let total: u32 = ks.iter().sum();
    (pts, ks.iter().map(|&k| k as f64 / total as f64).collect())
}

#[test]
fn small_instances_match_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..200 {
        let n = 1 + case % 4;
        let d = 1 + case % 2;
        let (pts, w) = random_instance(&mut rng, n, d);
        let plan = solve_discrete_ot(&pts, &w, DEFAULT_OT_TOLERANCE).unwrap();
        let oracle = brute_force_ot_cost(&pts, &w);
        assert!((plan.cost - oracle).abs() <= 1e-9, "case {case}: {} vs {oracle}", plan.cost);
        assert!(plan.marginal_error(&w) <= 1e-9);
        assert!(plan.g.iter().all(|&g| g >= 0.0));
    }
}

#[test]
fn large_instances_are_feasible() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for &n in &[10usize, 100, 500] {
        let pts = Points::new(2, (0..2 * n).map(|_| rng.random_range(-3.0..3.0)).collect());
        let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>().powi(3)).collect();
        let s: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|x| x / s).collect();
        let plan = solve_discrete_ot(&pts, &w, DEFAULT_OT_TOLERANCE).unwrap();
        assert!(plan.marginal_error(&w) <= 1e-9, "n={n}: {}", plan.marginal_error(&w));
        assert!(plan.g.iter().all(|&g| g >= 0.0));
    }
}

#[test]
fn permuting_points_permutes_the_plan() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..20 {
        let n = 6;
        let pts = Points::new(2, (0..2 * n).map(|_| rng.random_range(-1.0..1.0)).collect());
        let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
        let s: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|x| x / s).collect();
        let perm = [3usize, 0, 5, 1, 4, 2];
        let pts_p = pts.select(&perm);
        let w_p: Vec<f64> = perm.iter().map(|&i| w[i]).collect();

        let a = solve_discrete_ot(&pts, &w, DEFAULT_OT_TOLERANCE).unwrap();
        let b = solve_discrete_ot(&pts_p, &w_p, DEFAULT_OT_TOLERANCE).unwrap();
        assert!((a.cost - b.cost).abs() < 1e-12);
        for (pi, &i) in perm.iter().enumerate() {
            for (pj, &j) in perm.iter().enumerate() {
                assert!((a.get(i, j) - b.get(pi, pj)).abs() < 1e-9);
            }
        }
        let va = barycentric_velocity(&a, &pts, 0.1).unwrap();
        let vb = barycentric_velocity(&b, &pts_p, 0.1).unwrap();
        for (pi, &i) in perm.iter().enumerate() {
            for k in 0..2 {
                assert!((va.row(i)[k] - vb.row(pi)[k]).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn duplicate_points_are_allowed() {
    let pts = Points::from_scalars(&[1.0, 1.0, 3.0]);
    let w = [0.5, 0.0, 0.5];
    let plan = solve_discrete_ot(&pts, &w, DEFAULT_OT_TOLERANCE).unwrap();
    assert!(plan.marginal_error(&w) < 1e-12);
    assert!((plan.cost - brute_force_ot_cost(&pts, &w)).abs() < 1e-12);
}

#[test]
fn solver_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (pts, w) = random_instance(&mut rng, 40, 1);
    let a = solve_discrete_ot(&pts, &w, DEFAULT_OT_TOLERANCE).unwrap();
    let b = solve_discrete_ot(&pts, &w, DEFAULT_OT_TOLERANCE).unwrap();
    assert_eq!(a.g, b.g);
}

#[test]
fn two_thousand_points_are_feasible() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 2000;
    let pts = Points::new(1, (0..n).map(|_| rng.random_range(-4.0..4.0)).collect());
    let raw: Vec<f64> = pts.as_slice().iter().map(|x| (-(x - 1.0) * (x - 1.0)).exp()).collect();
    let s: f64 = raw.iter().sum();
    let w: Vec<f64> = raw.iter().map(|x| x / s).collect();
    let start = std::time::Instant::now();
    let plan = solve_discrete_ot(&pts, &w, DEFAULT_OT_TOLERANCE).unwrap();
    eprintln!("n=2000 solved in {:?}", start.elapsed());
    assert!(plan.marginal_error(&w) <= 1e-9, "{}", plan.marginal_error(&w));
    assert!(plan.g.iter().all(|&g| g >= 0.0));
}
