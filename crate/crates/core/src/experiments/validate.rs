//! Numerical self-checks runnable from the command line.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::density::{self, DensityParams};
use crate::error::{Error, Result};
use crate::normalization::{CSolver, GridValues, TensorGrid};
use crate::potentials::{DoubleWell, Potential};
use crate::scalar_math::{lambert_w0, lambert_w0_exp};
use crate::schedule::CoolingSchedule;
use crate::transport::{solve_discrete_ot, DEFAULT_OT_TOLERANCE};
use crate::Points;

pub const SUITES: [&str; 5] = ["lambert", "weak-convergence", "gibbs-limit", "c-derivative", "transport"];

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub value: f64,
    /// Upper bound on `value` (comparisons encode pass as `value <= threshold`).
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, suite: &'static str, name: impl Into<String>, value: f64, threshold: f64) {
        self.checks.push(Check { suite, name: name.into(), value, threshold, passed: value <= threshold });
    }

    /// Records a boolean property as value 0 (holds) or 1 (fails).
    fn push_flag(&mut self, suite: &'static str, name: impl Into<String>, holds: bool) {
        self.push(suite, name, if holds { 0.0 } else { 1.0 }, 0.0);
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{:<4} {:<17} {:<52} {:>12.4e} (<= {:.1e})",
                if c.passed { "PASS" } else { "FAIL" },
                c.suite,
                c.name,
                c.value,
                c.threshold
            )?;
        }
        Ok(())
    }
}

/// Runs one suite, or every suite for `"all"`.
pub fn validate(suite: &str) -> Result<Report> {
    let mut report = Report::default();
    match suite {
        "all" => {
            for s in SUITES {
                report.checks.extend(validate(s)?.checks);
            }
        }
        "lambert" => lambert(&mut report)?,
        "weak-convergence" => weak_convergence(&mut report)?,
        "gibbs-limit" => gibbs_limit(&mut report),
        "c-derivative" => c_derivative(&mut report)?,
        "transport" => transport(&mut report)?,
        other => return Err(Error::UnknownSuite(other.to_string())),
    }
    Ok(report)
}

fn lambert(r: &mut Report) -> Result<()> {
    for k in -8..=8 {
        let x = 10f64.powi(k);
        let w = lambert_w0(x)?;
        r.push("lambert", format!("|W e^W - x| / max(1, x) at x = 1e{k}"), (w * w.exp() - x).abs() / x.max(1.0), 1e-12);
    }
    let mut worst = 0.0f64;
    let mut z = -700.0;
    while z <= 700.0 {
        let a = lambert_w0_exp(z)?;
        let b = lambert_w0(z.exp())?;
        worst = worst.max((a - b).abs() / b);
        z += 0.5;
    }
    r.push("lambert", "max relative gap W(e^z) log-form vs direct", worst, 1e-10);
    Ok(())
}

/// Quadrature masses of the double-well density at large `beta`.
pub fn weak_convergence_masses(beta: f64, m: f64, nodes: usize) -> Result<(f64, f64)> {
    let pot = DoubleWell;
    let grid = TensorGrid::over_box(&pot.domain_box(), &[nodes])?;
    let gv = GridValues::new(&pot, &grid);
    let p = DensityParams::new(m, beta, 0.0);
    let (c, _) = gv.fit_c(&p, &CSolver { tol: 1e-12, max_expansions: 60 })?;
    let p = p.with_c(c);
    let xs = grid.points.as_slice();
    let outside = gv.mass_where(&p, |i| !(3.0..=5.0).contains(&xs[i]));
    let near_local = gv.mass_where(&p, |i| (-4.0..=-2.0).contains(&xs[i]));
    Ok((outside, near_local))
}

fn weak_convergence(r: &mut Report) -> Result<()> {
    const S: &str = "weak-convergence";
    let betas = [10.0, 100.0, 1000.0];
    let mut prev: Option<(f64, f64)> = None;
    for &beta in &betas {
        let (out, local) = weak_convergence_masses(beta, 2.0, 100_001)?;
        let (out_coarse, _) = weak_convergence_masses(beta, 2.0, 10_001)?;
        r.push(S, format!("grid refinement gap, beta = {beta}"), (out - out_coarse).abs(), 1e-3);
        r.push(S, format!("mass outside [3,5], beta = {beta}"), out, 1.0);
        r.push(S, format!("mass in [-4,-2], beta = {beta}"), local, 1.0);
        if let Some((po, pl)) = prev {
            r.push_flag(S, format!("outside mass decreases into beta = {beta}"), out < po);
            r.push_flag(S, format!("local-well mass decreases into beta = {beta}"), local < pl);
        }
        prev = Some((out, local));
    }
    let (out, local) = prev.unwrap();
    r.push(S, "mass outside [3,5] at beta = 1000", out, 0.01);
    r.push(S, "mass in [-4,-2] at beta = 1000", local, 1e-3);
    Ok(())
}

/// Sup-norm gap between `rho(m = 1 + eps, kappa = 2)` and `exp(-beta (u - C))`
/// on 100 equally spaced `u` in `[0, 10]`.
pub fn gibbs_limit_error(eps: f64, beta: f64, c: f64) -> f64 {
    let p = DensityParams::new(1.0 + eps, beta, c).with_kappa(2.0);
    (0..100)
        .map(|i| {
            let u = 10.0 * i as f64 / 99.0;
            (density::rho(&p, u) - (-beta * (u - c)).exp()).abs()
        })
        .fold(0.0, f64::max)
}

fn gibbs_limit(r: &mut Report) {
    const S: &str = "gibbs-limit";
    let mut prev = f64::INFINITY;
    for eps in [1e-2, 1e-3, 1e-4] {
        let e = gibbs_limit_error(eps, 1.0, 0.0);
        r.push(S, format!("sup error at eps = {eps:e}"), e, 1.0);
        r.push_flag(S, format!("error decreases into eps = {eps:e}"), e < prev);
        prev = e;
    }
    r.push(S, "sup error at eps = 1e-4", prev, 5e-3);
}

/// Quadrature `C'(t)` and the central difference of quadrature `C(t)` on the
/// double-well.
pub fn c_derivative_pair(schedule: &CoolingSchedule, m: f64, t: f64, delta: f64) -> Result<(f64, f64)> {
    let pot = DoubleWell;
    let grid = TensorGrid::over_box(&pot.domain_box(), &[100_001])?;
    let gv = GridValues::new(&pot, &grid);
    let solver = CSolver { tol: 1e-13, max_expansions: 60 };
    let fit = |t: f64| -> Result<f64> { Ok(gv.fit_c(&DensityParams::new(m, schedule.beta(t)?, 0.0), &solver)?.0) };
    let c = fit(t)?;
    let analytic = gv.c_derivative(&DensityParams::new(m, schedule.beta(t)?, c), schedule.beta_prime(t)?);
    let fd = (fit(t + delta)? - fit(t - delta)?) / (2.0 * delta);
    Ok((analytic, fd))
}

fn c_derivative(r: &mut Report) -> Result<()> {
    let schedule = CoolingSchedule::quadratic(0.25, 25.0);
    for t in [0.2, 0.5, 0.8] {
        let (a, fd) = c_derivative_pair(&schedule, 2.0, t, 1e-3)?;
        r.push("c-derivative", format!("relative gap to finite difference, t = {t}"), ((a - fd) / fd).abs(), 0.01);
    }
    Ok(())
}

/// Minimum cost over all basic feasible solutions, for tiny instances.
fn vertex_minimum(cost: &[f64], n: usize, w: &[f64]) -> f64 {
    let rows = 2 * n - 1;
    let cols = n * n;
    let rhs: Vec<f64> = (0..rows).map(|r| if r < n { 1.0 } else { n as f64 * w[r - n] }).collect();
    let entry = |r: usize, k: usize| -> f64 {
        let (i, j) = (k / n, k % n);
        if (r < n && i == r) || (r >= n && j == r - n) {
            1.0
        } else {
            0.0
        }
    };
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << cols) {
        if mask.count_ones() as usize != rows {
            continue;
        }
        let basis: Vec<usize> = (0..cols).filter(|k| mask >> k & 1 == 1).collect();
        let mut a: Vec<Vec<f64>> =
            (0..rows).map(|r| basis.iter().map(|&k| entry(r, k)).chain([rhs[r]]).collect()).collect();
        let mut singular = false;
        for col in 0..rows {
            let Some(piv) = (col..rows).find(|&r| a[r][col].abs() > 1e-12) else {
                singular = true;
                break;
            };
            a.swap(col, piv);
            let head = a[col].clone();
            for (r, row) in a.iter_mut().enumerate() {
                if r != col && row[col] != 0.0 {
                    let f = row[col] / head[col];
                    row.iter_mut().zip(&head).for_each(|(x, h)| *x -= f * h);
                }
            }
        }
        if singular {
            continue;
        }
        let x: Vec<f64> = (0..rows).map(|r| a[r][rows] / a[r][r]).collect();
        if x.iter().all(|&v| v >= -1e-12) {
            best = best.min(basis.iter().zip(&x).map(|(&k, v)| cost[k] * v).sum());
        }
    }
    best
}

fn transport(r: &mut Report) -> Result<()> {
    const S: &str = "transport";
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut worst_cost = 0.0f64;
    let mut worst_feas = 0.0f64;
    for case in 0..100 {
        let n = 1 + case % 3;
        let d = 1 + case % 2;
        let pts = Points::new(d, (0..n * d).map(|_| rng.random_range(-2.0..2.0)).collect());
        let mut ks: Vec<u32> = (0..n).map(|_| rng.random_range(0..4)).collect();
        if ks.iter().all(|&k| k == 0) {
            ks[0] = 1;
        }
        let total: u32 = ks.iter().sum();
        let w: Vec<f64> = ks.iter().map(|&k| k as f64 / total as f64).collect();
        let plan = solve_discrete_ot(&pts, &w, DEFAULT_OT_TOLERANCE)?;
        let cost: Vec<f64> = (0..n * n)
            .map(|k| pts.row(k / n).iter().zip(pts.row(k % n)).map(|(a, b)| (a - b) * (a - b)).sum())
            .collect();
        worst_cost = worst_cost.max((plan.cost - vertex_minimum(&cost, n, &w)).abs());
        worst_feas = worst_feas.max(plan.marginal_error(&w));
    }
    r.push(S, "max |cost - vertex minimum|, 100 instances n <= 3", worst_cost, 1e-9);
    for n in [50, 400] {
        let pts = Points::new(2, (0..2 * n).map(|_| rng.random_range(-3.0..3.0)).collect());
        let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let s: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|x| x / s).collect();
        let plan = solve_discrete_ot(&pts, &w, DEFAULT_OT_TOLERANCE)?;
        worst_feas = worst_feas.max(plan.marginal_error(&w));
    }
    r.push(S, "max marginal violation", worst_feas, 1e-9);
    Ok(())
}
