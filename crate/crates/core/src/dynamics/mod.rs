//! Particle integrators: controlled swarm gradient (CSG), controlled
//! simulated annealing (CSA), and the uncontrolled samplers used to draw
//! initial ensembles.
//!
//! A run alternates two time scales. Every `k` fine steps the velocity
//! field is re-estimated by importance reweighting and exact optimal
//! transport over the coarse step `h = k dt`; in between, positions follow
//! Euler-Maruyama steps with the velocities held fixed, and (for CSG) the
//! normalization constant is re-fitted after every fine step.

mod init;
mod kde;
pub mod noise;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::density::{self, DensityParams};
use crate::error::{Error, Result};
use crate::normalization::{c_derivative_weighted, estimate_c_from_values, predict_c, CSolver};
use crate::potentials::{self, Potential};
use crate::schedule::CoolingSchedule;
use crate::transport::{
    barycentric_velocity, effective_sample_size, gibbs_importance_weights, importance_weights_from_values,
    solve_discrete_ot,
};
use crate::Points;

pub use init::{init_langevin, init_mixture, init_uncontrolled_swarm, uniform_in_box, BurnIn};
pub use kde::{silverman_bandwidth, Kde};
use noise::ParticleNoise;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Csg,
    Csa,
    #[serde(alias = "uncontrolled-swarm")]
    UncontrolledSwarm,
    Langevin,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Csg => "csg",
            Method::Csa => "csa",
            Method::UncontrolledSwarm => "uncontrolled_swarm",
            Method::Langevin => "langevin",
        }
    }

    /// Whether the method tracks the normalization constant.
    pub fn uses_c(self) -> bool {
        matches!(self, Method::Csg | Method::UncontrolledSwarm)
    }

    /// Whether the method estimates a velocity field.
    pub fn is_controlled(self) -> bool {
        matches!(self, Method::Csg | Method::Csa)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csg" => Ok(Method::Csg),
            "csa" => Ok(Method::Csa),
            "uncontrolled_swarm" | "uncontrolled-swarm" => Ok(Method::UncontrolledSwarm),
            "langevin" => Ok(Method::Langevin),
            other => Err(format!("unknown method `{other}`")),
        }
    }
}

/// Time discretization of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorSpec {
    pub dt: f64,
    /// Fine steps per velocity refresh.
    pub k: usize,
    pub t_final: f64,
    /// Multiplier of `alpha / beta` under the square root of the swarm
    /// diffusion; 2 matches the continuous SDE.
    pub noise_factor: f64,
    pub method: Method,
}

impl IntegratorSpec {
    pub fn h(&self) -> f64 {
        self.k as f64 * self.dt
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be > 0, got {}", self.dt)));
        }
        if self.k == 0 {
            return Err(Error::Config("k must be >= 1".into()));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::Config(format!("T must be >= 0, got {}", self.t_final)));
        }
        if !(self.noise_factor > 0.0 && self.noise_factor.is_finite()) {
            return Err(Error::Config(format!("noise_factor must be > 0, got {}", self.noise_factor)));
        }
        self.n_steps().map(|_| ())
    }

    /// `T / dt`, which must be an integer up to rounding.
    pub fn n_steps(&self) -> Result<usize> {
        let ratio = self.t_final / self.dt;
        let n = ratio.round();
        if (ratio - n).abs() > 1e-6 * ratio.max(1.0) {
            return Err(Error::Config(format!("T = {} is not a multiple of dt = {}", self.t_final, self.dt)));
        }
        Ok(n as usize)
    }
}

/// Particle positions with the current control field and `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub positions: Points,
    /// Control field samples, held fixed between refreshes.
    pub velocities: Points,
    /// Current normalization constant; NaN until fitted.
    pub c: f64,
    pub t: f64,
    /// Seed of the per-particle noise streams.
    pub seed: u64,
    pub step_index: usize,
}

impl Ensemble {
    pub fn new(positions: Points, seed: u64) -> Self {
        let velocities = Points::zeros(positions.len(), positions.dim());
        Self { positions, velocities, c: f64::NAN, t: 0.0, seed, step_index: 0 }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.positions.dim()
    }
}

/// `X += dt (V - grad U) + amp_i sqrt(dt) xi`, then advances the clock.
fn advance(e: &mut Ensemble, pot: &dyn Potential, dt: f64, amps: &[f64], noise: &Points) -> Result<()> {
    if noise.len() != e.len() || noise.dim() != e.dim() {
        return Err(Error::Domain("noise array must match the ensemble shape".into()));
    }
    let sqrt_dt = dt.sqrt();
    let mut grad = vec![0.0; e.dim()];
    for i in 0..e.len() {
        pot.grad(e.positions.row(i), &mut grad);
        let v = e.velocities.row(i);
        let xi = noise.row(i);
        let s = amps[i] * sqrt_dt;
        let x = e.positions.row_mut(i);
        for j in 0..x.len() {
            x[j] += dt * (v[j] - grad[j]) + s * xi[j];
        }
    }
    e.step_index += 1;
    e.t = e.step_index as f64 * dt;
    if !e.positions.is_finite() {
        let bad = e.positions.rows().position(|x| x.iter().any(|v| !v.is_finite())).unwrap_or(0);
        return Err(Error::Integration {
            step: e.step_index,
            t: e.t,
            reason: format!("particle {bad} left the finite range"),
        });
    }
    Ok(())
}

/// One CSG fine step. `p` holds `beta(t)` and the current `C`; `beta_next`
/// is `beta(t + dt)`, at which `C` is re-fitted afterwards (warm-started
/// from the previous value). Returns the normalization residual.
pub fn csg_fine_step(
    e: &mut Ensemble,
    pot: &dyn Potential,
    p: &DensityParams,
    beta_next: f64,
    spec: &IntegratorSpec,
    noise: &Points,
    solver: &CSolver,
) -> Result<f64> {
    let amps: Vec<f64> = e
        .positions
        .rows()
        .map(|x| (spec.noise_factor * density::alpha_at(p, pot.value(x)) / p.beta).sqrt())
        .collect();
    advance(e, pot, spec.dt, &amps, noise)?;
    let us = potentials::values(pot, &e.positions);
    let (c, residual) = estimate_c_from_values(&us, &p.with_beta(beta_next), solver, Some(p.c))?;
    e.c = c;
    Ok(residual)
}

/// One CSA fine step with diffusion `sqrt(2 / beta)`.
pub fn csa_fine_step(
    e: &mut Ensemble,
    pot: &dyn Potential,
    beta: f64,
    spec: &IntegratorSpec,
    noise: &Points,
) -> Result<()> {
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("beta must be > 0, got {beta}")));
    }
    let amps = vec![(2.0 / beta).sqrt(); e.len()];
    advance(e, pot, spec.dt, &amps, noise)
}

/// One step of the uncontrolled swarm SDE, with the marginal density
/// replaced by a Gaussian KDE of the current ensemble.
pub fn swarm_fine_step(
    e: &mut Ensemble,
    pot: &dyn Potential,
    m: f64,
    beta: f64,
    noise_factor: f64,
    dt: f64,
    noise: &Points,
) -> Result<()> {
    let amps: Vec<f64> = {
        let kde = Kde::new(&e.positions);
        e.positions
            .rows()
            .map(|x| (noise_factor * density::alpha_mod(kde.density(x), m) / beta).sqrt())
            .collect()
    };
    advance(e, pot, dt, &amps, noise)
}

/// Diagnostics of one velocity refresh. Fields that do not apply to the
/// method are NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refresh {
    pub c_prime: f64,
    pub c_predicted: f64,
    pub clamped: bool,
    pub ess: f64,
    pub plan_cost: f64,
}

impl Refresh {
    fn idle(n: usize) -> Self {
        Self { c_prime: f64::NAN, c_predicted: f64::NAN, clamped: false, ess: n as f64, plan_cost: 0.0 }
    }
}

/// Re-estimates the velocity field over `[t, t + h]`. `p_now` carries `m`,
/// `kappa`, `beta(t)` and the current `C` (ignored for CSA).
pub fn refresh_velocity(
    e: &mut Ensemble,
    pot: &dyn Potential,
    p_now: &DensityParams,
    schedule: &CoolingSchedule,
    spec: &IntegratorSpec,
    ot_tolerance: f64,
) -> Result<Refresh> {
    let h = spec.h();
    let t = e.t;
    let us = potentials::values(pot, &e.positions);
    let (weights, c_prime, c_predicted, clamped) = match spec.method {
        Method::Csg => {
            let ones = vec![1.0; us.len()];
            let c_prime = c_derivative_weighted(&us, &ones, p_now, schedule.beta_prime(t)?);
            let pred = predict_c(p_now.c, c_prime, h)?;
            let p_next = p_now.with_beta(schedule.beta(t + h)?).with_c(pred.c);
            (importance_weights_from_values(&us, p_now, &p_next)?, c_prime, pred.c, pred.clamped)
        }
        Method::Csa => {
            let w = gibbs_importance_weights(&us, schedule.beta(t)?, schedule.beta(t + h)?)?;
            (w, f64::NAN, f64::NAN, false)
        }
        Method::UncontrolledSwarm | Method::Langevin => {
            e.velocities.as_mut_slice().fill(0.0);
            return Ok(Refresh::idle(e.len()));
        }
    };
    let ess = effective_sample_size(&weights);
    if ess < 2.0 {
        log::warn!("importance weights degenerate at t = {t}: ESS = {ess:.3}");
    }
    let plan = solve_discrete_ot(&e.positions, &weights, ot_tolerance)?;
    e.velocities = barycentric_velocity(&plan, &e.positions, h)?;
    Ok(Refresh { c_prime, c_predicted, clamped, ess, plan_cost: plan.cost })
}

/// Everything a run needs besides its initial ensemble.
#[derive(Clone, Copy)]
pub struct Simulation<'a> {
    pub pot: &'a dyn Potential,
    pub schedule: CoolingSchedule,
    pub m: f64,
    pub kappa: f64,
    pub spec: IntegratorSpec,
    pub solver: CSolver,
    pub ot_tolerance: f64,
    /// When false the velocity field stays zero (plain annealed dynamics).
    pub control: bool,
    /// Snapshot period in fine steps.
    pub record_every: usize,
}

impl Simulation<'_> {
    fn params(&self, beta: f64, c: f64) -> DensityParams {
        DensityParams { m: self.m, beta, c, kappa: self.kappa }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub positions: Points,
    pub c: f64,
    /// Cost of the last transport plan (NaN before the first refresh).
    pub plan_cost: f64,
    /// ESS of the last importance weights (NaN before the first refresh).
    pub ess: f64,
    /// Lowest `U` each particle has visited so far, over all fine steps.
    pub min_u: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
}

impl Trajectory {
    pub fn last(&self) -> &Snapshot {
        self.snapshots.last().expect("a trajectory always holds the initial snapshot")
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }
}

fn at_step(step: usize, t: f64) -> impl Fn(Error) -> Error {
    move |e| match e {
        e @ Error::Integration { .. } => e,
        other => Error::Integration { step, t, reason: other.to_string() },
    }
}

/// Integrates `initial` from `t = 0` to `T`. The ensemble's `C` is fitted
/// empirically at `beta(0)` when it is not already set.
pub fn run(sim: &Simulation, initial: Ensemble) -> Result<Trajectory> {
    let spec = &sim.spec;
    spec.validate()?;
    if sim.record_every == 0 {
        return Err(Error::Config("record_every must be >= 1".into()));
    }
    if initial.is_empty() {
        return Err(Error::Config("the initial ensemble is empty".into()));
    }
    if initial.dim() != sim.pot.dim() {
        return Err(Error::Config(format!(
            "ensemble dimension {} does not match the potential ({})",
            initial.dim(),
            sim.pot.dim()
        )));
    }
    let n_steps = spec.n_steps()?;
    let n = initial.len();

    let mut e = initial;
    e.t = 0.0;
    e.step_index = 0;
    e.velocities = Points::zeros(n, e.dim());
    if spec.method.uses_c() {
        sim.params(sim.schedule.beta(0.0)?, 0.0).validate()?;
        if !e.c.is_finite() {
            let us = potentials::values(sim.pot, &e.positions);
            let p0 = sim.params(sim.schedule.beta(0.0)?, 0.0);
            e.c = estimate_c_from_values(&us, &p0, &sim.solver, None).map_err(at_step(0, 0.0))?.0;
        }
    }

    let mut min_u = potentials::values(sim.pot, &e.positions);
    let mut last = (f64::NAN, f64::NAN);
    let snapshot = |e: &Ensemble, min_u: &[f64], last: (f64, f64)| Snapshot {
        t: e.t,
        positions: e.positions.clone(),
        c: e.c,
        plan_cost: last.0,
        ess: last.1,
        min_u: min_u.to_vec(),
    };
    let mut snapshots = Vec::with_capacity(1 + n_steps / sim.record_every);
    snapshots.push(snapshot(&e, &min_u, last));

    let mut noise_src = ParticleNoise::new(e.seed, n);
    let mut noise = Points::zeros(n, e.dim());
    for step in 0..n_steps {
        let t = e.t;
        let beta = sim.schedule.beta(t)?;
        let beta_next = sim.schedule.beta(t + spec.dt)?;
        let p = sim.params(beta, e.c);
        if step % spec.k == 0 && spec.method.is_controlled() {
            let r = if sim.control {
                refresh_velocity(&mut e, sim.pot, &p, &sim.schedule, spec, sim.ot_tolerance)
                    .map_err(at_step(step, t))?
            } else {
                e.velocities.as_mut_slice().fill(0.0);
                Refresh::idle(n)
            };
            log::debug!("t = {t:.4}: C = {:.6}, C' = {:.4}, ESS = {:.2}, cost = {:.4e}", e.c, r.c_prime, r.ess, r.plan_cost);
            last = (r.plan_cost, r.ess);
        }
        noise_src.fill(&mut noise);
        let result = match spec.method {
            Method::Csg => csg_fine_step(&mut e, sim.pot, &p, beta_next, spec, &noise, &sim.solver).map(|_| ()),
            Method::Csa | Method::Langevin => csa_fine_step(&mut e, sim.pot, beta, spec, &noise),
            Method::UncontrolledSwarm => {
                swarm_fine_step(&mut e, sim.pot, sim.m, beta, spec.noise_factor, spec.dt, &noise).and_then(|_| {
                    let us = potentials::values(sim.pot, &e.positions);
                    let (c, _) = estimate_c_from_values(&us, &p.with_beta(beta_next), &sim.solver, Some(p.c))?;
                    e.c = c;
                    Ok(())
                })
            }
        };
        result.map_err(at_step(step, t))?;
        for (mu, x) in min_u.iter_mut().zip(e.positions.rows()) {
            *mu = mu.min(sim.pot.value(x));
        }
        if (step + 1) % sim.record_every == 0 {
            snapshots.push(snapshot(&e, &min_u, last));
        }
    }
    Ok(Trajectory { snapshots })
}
