//! Initial ensembles: uncontrolled samplers at fixed `beta(0)` and the
//! Gaussian mixture of the camel experiments.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::noise::{stream, ParticleNoise};
use super::{advance, swarm_fine_step, Ensemble};
use crate::density::DensityParams;
use crate::error::{Error, Result};
use crate::normalization::{estimate_c_from_values, CSolver};
use crate::potentials::{self, DomainBox, Potential};
use crate::Points;

const TAG_START: u64 = 1;
const TAG_BURN_IN: u64 = 2;
const TAG_MIXTURE: u64 = 3;

/// Burn-in of the fixed-temperature samplers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BurnIn {
    pub steps: usize,
    pub dt: f64,
}

impl Default for BurnIn {
    fn default() -> Self {
        Self { steps: 2000, dt: 0.01 }
    }
}

impl BurnIn {
    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("burn-in dt must be > 0, got {}", self.dt)));
        }
        Ok(())
    }
}

/// `n` uniform draws from the box.
pub fn uniform_in_box<R: Rng>(domain: &DomainBox, n: usize, rng: &mut R) -> Points {
    let d = domain.dim();
    let mut data = Vec::with_capacity(n * d);
    for _ in 0..n {
        for j in 0..d {
            data.push(rng.random_range(domain.lo[j]..domain.hi[j]));
        }
    }
    Points::new(d, data)
}

fn start(pot: &dyn Potential, n: usize, seed: u64) -> Result<Ensemble> {
    if n == 0 {
        return Err(Error::Config("need at least one particle".into()));
    }
    let positions = uniform_in_box(&pot.domain_box(), n, &mut stream(seed, TAG_START));
    Ok(Ensemble::new(positions, seed))
}

fn finish(mut e: Ensemble) -> Ensemble {
    e.t = 0.0;
    e.step_index = 0;
    e
}

/// Langevin diffusion `dX = -grad U dt + sqrt(2 / beta0) dB` from a uniform
/// start in the potential's box.
pub fn init_langevin(pot: &dyn Potential, beta0: f64, n: usize, burn_in: BurnIn, seed: u64) -> Result<Ensemble> {
    if !(beta0 > 0.0) {
        return Err(Error::Config(format!("beta0 must be > 0, got {beta0}")));
    }
    burn_in.validate()?;
    let mut e = start(pot, n, seed)?;
    let mut src = ParticleNoise::new(super::noise::mix_seed(seed, TAG_BURN_IN), n);
    let mut noise = Points::zeros(n, e.dim());
    let amps = vec![(2.0 / beta0).sqrt(); n];
    for _ in 0..burn_in.steps {
        src.fill(&mut noise);
        advance(&mut e, pot, burn_in.dt, &amps, &noise)?;
    }
    Ok(finish(e))
}

/// Uncontrolled swarm SDE at `beta0` with a KDE marginal, started uniformly
/// in the potential's box. The returned ensemble carries `C` fitted
/// empirically at `beta0`.
pub fn init_uncontrolled_swarm(
    pot: &dyn Potential,
    m: f64,
    beta0: f64,
    n: usize,
    burn_in: BurnIn,
    seed: u64,
    solver: &CSolver,
) -> Result<Ensemble> {
    let p = DensityParams::new(m, beta0, 0.0);
    p.validate()?;
    burn_in.validate()?;
    let mut e = start(pot, n, seed)?;
    let mut src = ParticleNoise::new(super::noise::mix_seed(seed, TAG_BURN_IN), n);
    let mut noise = Points::zeros(n, e.dim());
    for _ in 0..burn_in.steps {
        src.fill(&mut noise);
        swarm_fine_step(&mut e, pot, m, beta0, 2.0, burn_in.dt, &noise)?;
    }
    let us = potentials::values(pot, &e.positions);
    e.c = estimate_c_from_values(&us, &p, solver, None)?.0;
    Ok(finish(e))
}

/// Equal-weight Gaussian mixture with covariance `cov_scale * I`.
pub fn init_mixture(centers: &[Vec<f64>], cov_scale: f64, n: usize, seed: u64) -> Result<Ensemble> {
    if centers.is_empty() {
        return Err(Error::Config("mixture needs at least one center".into()));
    }
    let d = centers[0].len();
    if d == 0 || centers.iter().any(|c| c.len() != d) {
        return Err(Error::Config("mixture centers must share a positive dimension".into()));
    }
    if !(cov_scale > 0.0 && cov_scale.is_finite()) {
        return Err(Error::Config(format!("cov_scale must be > 0, got {cov_scale}")));
    }
    if n == 0 {
        return Err(Error::Config("need at least one particle".into()));
    }
    let mut rng = stream(seed, TAG_MIXTURE);
    let sd = cov_scale.sqrt();
    let mut data = Vec::with_capacity(n * d);
    for _ in 0..n {
        let c = &centers[rng.random_range(0..centers.len())];
        for &cj in c {
            let z: f64 = StandardNormal.sample(&mut rng);
            data.push(cj + sd * z);
        }
    }
    Ok(Ensemble::new(Points::new(d, data), seed))
}
