//! Velocity-field estimation by importance reweighting and exact discrete
//! optimal transport.
//!
//! A sample of the current density is reweighted towards the density one
//! coarse step ahead; the optimal coupling between the uniform and the
//! reweighted empirical measures (squared Euclidean cost) is projected onto
//! its row barycenters to give a displacement per particle.

mod network_simplex;

use crate::density::{self, DensityParams};
use crate::error::{Error, Result};
use crate::points::squared_distance;
use crate::Points;

use network_simplex::Transportation;

/// Default tolerance on the target weights summing to one.
pub const DEFAULT_OT_TOLERANCE: f64 = 1e-9;

/// Points with normalized nonnegative weights.
#[derive(Debug, Clone)]
pub struct WeightedSample {
    pub points: Points,
    pub weights: Vec<f64>,
}

impl WeightedSample {
    pub fn new(points: Points, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(Error::Transport("weighted sample needs n >= 1 points and n weights".into()));
        }
        if !points.is_finite() {
            return Err(Error::Transport("non-finite coordinates".into()));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::Transport("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Transport(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { points, weights })
    }
}

/// Optimal coupling `G` (row-major `n x n`) between the uniform measure on
/// the sources and `n * w` on the targets.
#[derive(Debug, Clone)]
pub struct TransportPlan {
    pub n: usize,
    pub g: Vec<f64>,
    /// `<C, G>` with `C_ij = |X_i - X_j|^2`.
    pub cost: f64,
}

impl TransportPlan {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.g[i * self.n + j]
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.g.chunks_exact(self.n).map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.n];
        for row in self.g.chunks_exact(self.n) {
            for (a, b) in s.iter_mut().zip(row) {
                *a += b;
            }
        }
        s
    }

    /// Largest absolute marginal violation against `G 1 = 1`, `G^T 1 = n w`.
    pub fn marginal_error(&self, target_weights: &[f64]) -> f64 {
        let n = self.n as f64;
        let rows = self.row_sums().into_iter().map(|r| (r - 1.0).abs());
        let cols = self.col_sums().into_iter().zip(target_weights).map(|(c, w)| (c - n * w).abs());
        rows.chain(cols).fold(0.0, f64::max)
    }
}

/// Normalizes log-weights by max-shifting before exponentiation.
pub fn normalize_log_weights(log_w: &[f64]) -> Result<Vec<f64>> {
    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(Error::Transport("degenerate importance weights".into()));
    }
    let mut w: Vec<f64> = log_w.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = w.iter().sum();
    // the maximal entry contributes exactly 1, so total >= 1
    assert!(total >= 1.0, "max-shifted weights lost their leading term");
    w.iter_mut().for_each(|x| *x /= total);
    Ok(w)
}

/// Self-normalized weights `rho(u; p_next) / rho(u; p_now)` at potential
/// values `us`.
pub fn importance_weights_from_values(us: &[f64], p_now: &DensityParams, p_next: &DensityParams) -> Result<Vec<f64>> {
    if us.is_empty() {
        return Err(Error::Transport("no particles to reweight".into()));
    }
    if p_now.m != p_next.m || p_now.kappa != p_next.kappa {
        return Err(Error::Transport("importance weights need matching m and kappa".into()));
    }
    let log_w: Vec<f64> =
        us.iter().map(|&u| density::log_rho(p_next, u) - density::log_rho(p_now, u)).collect();
    normalize_log_weights(&log_w)
}

pub fn importance_weights(
    particles: &Points,
    pot: &dyn crate::potentials::Potential,
    p_now: &DensityParams,
    p_next: &DensityParams,
) -> Result<Vec<f64>> {
    let us = crate::potentials::values(pot, particles);
    importance_weights_from_values(&us, p_now, p_next)
}

/// Gibbs-curve weights `exp(-(beta_next - beta_now) u)`; no normalization
/// constant is involved.
pub fn gibbs_importance_weights(us: &[f64], beta_now: f64, beta_next: f64) -> Result<Vec<f64>> {
    if us.is_empty() {
        return Err(Error::Transport("no particles to reweight".into()));
    }
    let db = beta_next - beta_now;
    let log_w: Vec<f64> = us.iter().map(|u| -db * u).collect();
    normalize_log_weights(&log_w)
}

/// `1 / sum w_i^2`.
pub fn effective_sample_size(weights: &[f64]) -> f64 {
    1.0 / weights.iter().map(|w| w * w).sum::<f64>()
}

/// Exact optimal coupling between `(1/n) sum delta_{X_i}` and
/// `sum w_j delta_{X_j}` under squared Euclidean cost, scaled so that rows
/// sum to one.
pub fn solve_discrete_ot(points: &Points, target_weights: &[f64], tolerance: f64) -> Result<TransportPlan> {
    let n = points.len();
    if n == 0 || target_weights.len() != n {
        return Err(Error::Transport(format!(
            "need one target weight per point ({} points, {} weights)",
            n,
            target_weights.len()
        )));
    }
    let total: f64 = target_weights.iter().sum();
    if (total - 1.0).abs() > tolerance || target_weights.iter().any(|w| !(*w >= 0.0)) {
        return Err(Error::Transport(format!("target weights must be nonnegative and sum to 1 (sum {total})")));
    }
    if !points.is_finite() {
        return Err(Error::Transport("non-finite point coordinates".into()));
    }

    let mut cost = vec![0.0; n * n];
    for i in 0..n {
        let xi = points.row(i);
        for j in 0..i {
            let c = squared_distance(xi, points.row(j));
            cost[i * n + j] = c;
            cost[j * n + i] = c;
        }
    }

    let supply = vec![1.0; n];
    let demand: Vec<f64> = target_weights.iter().map(|w| w * n as f64).collect();
    let sol = Transportation { supply: &supply, demand: &demand, cost: &cost }.solve(1e-12);
    // rounding in sum(n w) != n is the only admissible artificial flow
    if sol.artificial_flow > tolerance * n as f64 + 1e-9 {
        return Err(Error::Transport(format!("solver left {} units on artificial arcs", sol.artificial_flow)));
    }
    log::trace!("network simplex: n = {n}, {} pivots", sol.pivots);
    let plan_cost = sol.flow.iter().zip(&cost).map(|(g, c)| g * c).sum();
    Ok(TransportPlan { n, g: sol.flow, cost: plan_cost })
}

/// `V_i = (sum_j G_ij X_j - X_i) / h`.
pub fn barycentric_velocity(plan: &TransportPlan, points: &Points, h: f64) -> Result<Points> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("coarse step h must be > 0, got {h}")));
    }
    if plan.n != points.len() {
        return Err(Error::Transport("plan and point set sizes differ".into()));
    }
    let d = points.dim();
    let mut v = Points::zeros(plan.n, d);
    for i in 0..plan.n {
        let row = &plan.g[i * plan.n..(i + 1) * plan.n];
        let out = v.row_mut(i);
        for (j, &g) in row.iter().enumerate() {
            if g != 0.0 {
                for (o, x) in out.iter_mut().zip(points.row(j)) {
                    *o += g * x;
                }
            }
        }
        for (o, x) in out.iter_mut().zip(points.row(i)) {
            *o = (*o - x) / h;
        }
    }
    Ok(v)
}
