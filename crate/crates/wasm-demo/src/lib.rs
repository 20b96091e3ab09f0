//! WebAssembly entry points for the page in `www/`.
//!
//! The logic lives in plain functions returning `Result<_, String>` so it can
//! be exercised natively; the exported wrappers only convert errors.

use swarm_anneal::density::{self, DensityParams};
use swarm_anneal::dynamics::Trajectory;
use swarm_anneal::experiments::{
    aggregate_heatmap, final_fraction_in, median_min_u_curve, run_many, weak_convergence_masses, Bins, InitKind,
    RunConfig,
};
use swarm_anneal::normalization::{CSolver, GridValues, TensorGrid};
use swarm_anneal::potentials::{DoubleWell, Potential, PotentialKind};
use swarm_anneal::schedule::CoolingSchedule;
use wasm_bindgen::prelude::*;

const T_BINS: usize = 50;
const X_BINS: usize = 64;
const MAX_PARTICLES: usize = 400;
const MAX_RUNS: usize = 50;

/// `[x, rho(x), gibbs(x)]` triples on `points` equally spaced nodes of the
/// double-well box; both densities integrate to one over the box.
pub fn density_curve_values(m: f64, beta: f64, points: usize) -> Result<Vec<f64>, String> {
    if points < 2 {
        return Err("need at least two points".into());
    }
    let pot = DoubleWell;
    let grid = TensorGrid::over_box(&pot.domain_box(), &[4001]).map_err(|e| e.to_string())?;
    let gv = GridValues::new(&pot, &grid);
    let p = DensityParams::new(m, beta, 0.0);
    p.validate().map_err(|e| e.to_string())?;
    let (c, _) = gv.fit_c(&p, &CSolver { tol: 1e-12, max_expansions: 60 }).map_err(|e| e.to_string())?;
    let p = p.with_c(c);
    // shift by min U = 0 keeps exp(-beta u) in range
    let z: f64 = gv.us.iter().zip(&gv.weights).map(|(&u, &w)| w * density::gibbs_unnormalized(beta, u)).sum();

    let b = pot.domain_box();
    let step = (b.hi[0] - b.lo[0]) / (points - 1) as f64;
    let mut out = Vec::with_capacity(3 * points);
    for i in 0..points {
        let x = b.lo[0] + step * i as f64;
        let u = pot.value(&[x]);
        out.extend_from_slice(&[x, density::rho(&p, u), density::gibbs_unnormalized(beta, u) / z]);
    }
    Ok(out)
}

/// Result of [`anneal`]: a position heatmap over time and the median best
/// value found.
#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct Anneal {
    heatmap: Vec<f64>,
    curve_t: Vec<f64>,
    curve_u: Vec<f64>,
    fraction: f64,
}

#[wasm_bindgen]
impl Anneal {
    /// Row-major `t_bins x x_bins` counts.
    pub fn heatmap(&self) -> Vec<f64> {
        self.heatmap.clone()
    }

    pub fn t_bins(&self) -> usize {
        T_BINS
    }

    pub fn x_bins(&self) -> usize {
        X_BINS
    }

    pub fn curve_t(&self) -> Vec<f64> {
        self.curve_t.clone()
    }

    pub fn curve_u(&self) -> Vec<f64> {
        self.curve_u.clone()
    }

    /// Share of final particles in `[3, 5]`.
    pub fn fraction_in_well(&self) -> f64 {
        self.fraction
    }
}

/// Runs `runs` double-well experiments with `beta(t) = 0.25 + rate t^2`.
pub fn anneal_runs(method: &str, m: f64, rate: f64, n_particles: usize, runs: usize, seed: u64) -> Result<Anneal, String> {
    if n_particles > MAX_PARTICLES || runs > MAX_RUNS {
        return Err(format!("keep particles <= {MAX_PARTICLES} and runs <= {MAX_RUNS} in the browser"));
    }
    let method = method.parse()?;
    let mut cfg = RunConfig::new(method, PotentialKind::DoubleWell, CoolingSchedule::quadratic(0.25, rate));
    cfg.m = m;
    cfg.n_particles = n_particles;
    cfg.n_runs = runs;
    cfg.seed = seed;
    cfg.init.kind = Some(InitKind::Langevin);
    cfg.init.burn_in_steps = 500;
    let trajs: Vec<Trajectory> =
        run_many(&cfg, 1).map_err(|e| e.to_string())?.into_iter().map(|r| r.trajectory).collect();

    let bins = Bins::new(-8.0, 8.0, X_BINS).map_err(|e| e.to_string())?;
    let h = aggregate_heatmap(&trajs, 0, T_BINS, bins).map_err(|e| e.to_string())?;
    let curve = median_min_u_curve(&trajs, n_particles).map_err(|e| e.to_string())?;
    Ok(Anneal {
        heatmap: h.counts.iter().flatten().map(|&c| c as f64).collect(),
        curve_t: curve.iter().map(|p| p.0).collect(),
        curve_u: curve.iter().map(|p| p.1).collect(),
        fraction: final_fraction_in(&trajs, 0, 3.0, 5.0),
    })
}

/// Mass of the invariant density outside `[3, 5]` at fixed `beta`.
pub fn mass_outside_value(beta: f64, m: f64) -> Result<f64, String> {
    weak_convergence_masses(beta, m, 20_001).map(|(outside, _)| outside).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn density_curve(m: f64, beta: f64, points: usize) -> Result<Vec<f64>, JsError> {
    density_curve_values(m, beta, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn anneal(method: &str, m: f64, rate: f64, n_particles: usize, runs: usize, seed: u32) -> Result<Anneal, JsError> {
    anneal_runs(method, m, rate, n_particles, runs, seed as u64).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn mass_outside_well(beta: f64, m: f64) -> Result<f64, JsError> {
    mass_outside_value(beta, m).map_err(|e| JsError::new(&e))
}
