//! Executes the runs of a configuration, in parallel when available.

use rand::seq::index::sample;

use super::config::{InitKind, RunConfig};
use crate::dynamics::noise::{mix_seed, stream};
use crate::dynamics::{self, init_langevin, init_mixture, init_uncontrolled_swarm, uniform_in_box, Ensemble, Simulation, Trajectory};
use crate::error::{Error, Result};
use crate::normalization::estimate_c_from_values;
use crate::density::DensityParams;
use crate::potentials::{self, Potential};

/// Environment variable capping the worker count.
pub const WORKERS_ENV: &str = "SWARM_ANNEAL_WORKERS";

const TAG_RUN: u64 = 0x100;
const TAG_REFERENCE: u64 = 0x200;
const TAG_SUBSET: u64 = 0x300;

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub run: usize,
    pub seed: u64,
    pub trajectory: Trajectory,
}

/// Seed of run `r`; independent of the worker count.
pub fn run_seed(cfg: &RunConfig, r: usize) -> u64 {
    mix_seed(cfg.seed, TAG_RUN + r as u64)
}

/// `requested` (or the machine's parallelism), capped by `SWARM_ANNEAL_WORKERS`.
pub fn resolve_workers(requested: Option<usize>) -> usize {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut w = requested.unwrap_or(available).max(1);
    if let Some(cap) = std::env::var(WORKERS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        w = w.min(cap.max(1));
    }
    w
}

/// Draws one ensemble of `n` particles according to `cfg.init`.
pub fn draw_initial(cfg: &RunConfig, pot: &dyn Potential, n: usize, seed: u64) -> Result<Ensemble> {
    let beta0 = cfg.schedule.beta(0.0)?;
    let init = &cfg.init;
    match init.resolved_kind(cfg.method) {
        InitKind::UncontrolledSwarm => {
            init_uncontrolled_swarm(pot, cfg.m, beta0, n, init.burn_in(), seed, &cfg.solver())
        }
        InitKind::Langevin => init_langevin(pot, beta0, n, init.burn_in(), seed),
        InitKind::Mixture => init_mixture(&init.centers, init.cov_scale, n, seed),
        InitKind::Uniform => {
            let positions = uniform_in_box(&pot.domain_box(), n, &mut stream(seed, 0));
            Ok(Ensemble::new(positions, seed))
        }
    }
}

/// The shared reference ensemble of the subset protocol, with `C` fitted at
/// `beta(0)` whenever the method tracks it.
pub fn reference_ensemble(cfg: &RunConfig, pot: &dyn Potential) -> Result<Option<Ensemble>> {
    let Some(size) = cfg.init.reference_size else { return Ok(None) };
    let seed = cfg.init.reference_seed.unwrap_or_else(|| mix_seed(cfg.seed, TAG_REFERENCE));
    let mut e = draw_initial(cfg, pot, size, seed)?;
    if cfg.method.uses_c() && !e.c.is_finite() {
        let us = potentials::values(pot, &e.positions);
        let p0 = DensityParams { m: cfg.m, beta: cfg.schedule.beta(0.0)?, c: 0.0, kappa: cfg.kappa };
        e.c = estimate_c_from_values(&us, &p0, &cfg.solver(), None)?.0;
    }
    Ok(Some(e))
}

fn initial_for_run(cfg: &RunConfig, pot: &dyn Potential, reference: Option<&Ensemble>, r: usize) -> Result<Ensemble> {
    let seed = run_seed(cfg, r);
    match reference {
        Some(reference) => {
            let mut rng = stream(mix_seed(cfg.seed, TAG_SUBSET), r as u64);
            let mut idx = sample(&mut rng, reference.len(), cfg.n_particles).into_vec();
            idx.sort_unstable();
            let mut e = Ensemble::new(reference.positions.select(&idx), seed);
            e.c = reference.c;
            Ok(e)
        }
        None => draw_initial(cfg, pot, cfg.n_particles, seed),
    }
}

/// One run of the configuration.
pub fn run_one(cfg: &RunConfig, pot: &dyn Potential, reference: Option<&Ensemble>, r: usize) -> Result<RunOutput> {
    let sim = Simulation {
        pot,
        schedule: cfg.schedule,
        m: cfg.m,
        kappa: cfg.kappa,
        spec: cfg.spec(),
        solver: cfg.solver(),
        ot_tolerance: cfg.ot_tolerance,
        control: cfg.control,
        record_every: cfg.record_every,
    };
    let wrap = |e: Error| Error::Run { run: r, source: Box::new(e) };
    let initial = initial_for_run(cfg, pot, reference, r).map_err(wrap)?;
    let seed = initial.seed;
    let trajectory = dynamics::run(&sim, initial).map_err(wrap)?;
    Ok(RunOutput { run: r, seed, trajectory })
}

/// Executes all runs on up to `workers` threads. Results come back in run
/// order and do not depend on `workers`.
pub fn run_many(cfg: &RunConfig, workers: usize) -> Result<Vec<RunOutput>> {
    cfg.validate()?;
    let pot = cfg.potential.build();
    let pot = pot.as_ref();
    let reference = reference_ensemble(cfg, pot)?;
    let reference = reference.as_ref();
    let results = execute(cfg.n_runs, workers, |r| run_one(cfg, pot, reference, r));
    results.into_iter().collect()
}

#[cfg(feature = "parallel")]
fn execute<T: Send>(n: usize, workers: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    if workers <= 1 {
        return (0..n).map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(|| (0..n).into_par_iter().map(&f).collect()),
        Err(e) => {
            log::warn!("could not start {workers} workers ({e}); running sequentially");
            (0..n).map(f).collect()
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn execute<T: Send>(n: usize, _workers: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..n).map(f).collect()
}
