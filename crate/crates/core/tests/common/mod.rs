//! Test-only oracles, independent of the library's solution paths.
#![allow(dead_code)]

use swarm_anneal::Points;

/// Minimum of `<C, G>` over the vertices of the transportation polytope
/// `{G >= 0, G 1 = 1, G^T 1 = n w}`, found by enumerating every basis of
/// `2n - 1` columns. Only practical for `n <= 4`.
pub fn brute_force_ot_cost(points: &Points, w: &[f64]) -> f64 {
    let n = points.len();
    let vars = n * n;
    let cost: Vec<f64> = (0..vars)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            points.row(i).iter().zip(points.row(j)).map(|(a, b)| (a - b) * (a - b)).sum()
        })
        .collect();
    // rows: n supply constraints, then the first n-1 demand constraints
    // (the last one is implied by balance)
    let r = 2 * n - 1;
    let mut a = vec![vec![0.0; vars]; r];
    let mut b = vec![0.0; r];
    for i in 0..n {
        for j in 0..n {
            a[i][i * n + j] = 1.0;
        }
        b[i] = 1.0;
    }
    for j in 0..n - 1 {
        for i in 0..n {
            a[n + j][i * n + j] = 1.0;
        }
        b[n + j] = n as f64 * w[j];
    }
    let mut best = f64::INFINITY;
    let mut basis: Vec<usize> = (0..r).collect();
    loop {
        if let Some(x) = solve_square(&a, &b, &basis) {
            if x.iter().all(|&v| v >= -1e-12) {
                let c: f64 = basis.iter().zip(&x).map(|(&k, v)| cost[k] * v).sum();
                best = best.min(c);
            }
        }
        // next combination
        let mut k = r;
        loop {
            if k == 0 {
                return best;
            }
            k -= 1;
            if basis[k] != k + vars - r {
                break;
            }
            if k == 0 {
                return best;
            }
        }
        basis[k] += 1;
        for l in k + 1..r {
            basis[l] = basis[l - 1] + 1;
        }
    }
}

fn solve_square(a: &[Vec<f64>], b: &[f64], cols: &[usize]) -> Option<Vec<f64>> {
    let r = cols.len();
    let mut m: Vec<Vec<f64>> = (0..r).map(|i| {
        let mut row: Vec<f64> = cols.iter().map(|&c| a[i][c]).collect();
        row.push(b[i]);
        row
    }).collect();
    for col in 0..r {
        let piv = (col..r).max_by(|&x, &y| m[x][col].abs().partial_cmp(&m[y][col].abs()).unwrap())?;
        if m[piv][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, piv);
        for row in 0..r {
            if row != col {
                let f = m[row][col] / m[col][col];
                if f != 0.0 {
                    for k in col..=r {
                        m[row][k] -= f * m[col][k];
                    }
                }
            }
        }
    }
    Some((0..r).map(|i| m[i][r] / m[i][i]).collect())
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

/// Total variation between a sample histogram and bin probabilities.
pub fn total_variation(sample: &[f64], lo: f64, hi: f64, probs: &[f64]) -> f64 {
    let bins = probs.len();
    let mut counts = vec![0.0; bins];
    for &x in sample {
        let k = (((x - lo) / (hi - lo)) * bins as f64).floor();
        let k = (k.max(0.0) as usize).min(bins - 1);
        counts[k] += 1.0;
    }
    let n = sample.len() as f64;
    0.5 * counts.iter().zip(probs).map(|(c, p)| (c / n - p).abs()).sum::<f64>()
}
