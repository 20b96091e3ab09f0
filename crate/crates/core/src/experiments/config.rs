//! Declarative run configuration, read from TOML.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{BurnIn, IntegratorSpec, Method};
use crate::error::{Error, Result};
use crate::normalization::CSolver;
use crate::potentials::PotentialKind;
use crate::schedule::CoolingSchedule;
use crate::transport::DEFAULT_OT_TOLERANCE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    /// KDE-driven swarm SDE at `beta(0)`.
    #[serde(alias = "uncontrolled-swarm", alias = "swarm")]
    UncontrolledSwarm,
    /// Langevin diffusion at `beta(0)`.
    Langevin,
    /// Gaussian mixture around `centers`.
    Mixture,
    /// Uniform on the potential's box, without burn-in.
    Uniform,
}

impl std::str::FromStr for InitKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uncontrolled_swarm" | "uncontrolled-swarm" | "swarm" => Ok(Self::UncontrolledSwarm),
            "langevin" => Ok(Self::Langevin),
            "mixture" => Ok(Self::Mixture),
            "uniform" => Ok(Self::Uniform),
            other => Err(format!("unknown init kind `{other}`")),
        }
    }
}

/// How the initial ensembles are drawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitSpec {
    /// Defaults to the swarm sampler for CSG and Langevin for CSA.
    pub kind: Option<InitKind>,
    pub burn_in_steps: usize,
    pub burn_in_dt: f64,
    pub centers: Vec<Vec<f64>>,
    pub cov_scale: f64,
    /// When set, one reference ensemble of this size is drawn and every run
    /// evolves a random subset of `n_particles` of it.
    pub reference_size: Option<usize>,
    /// Seed of the reference ensemble; derived from `seed` when absent.
    pub reference_seed: Option<u64>,
}

impl Default for InitSpec {
    fn default() -> Self {
        let b = BurnIn::default();
        Self {
            kind: None,
            burn_in_steps: b.steps,
            burn_in_dt: b.dt,
            centers: Vec::new(),
            cov_scale: 0.005,
            reference_size: None,
            reference_seed: None,
        }
    }
}

impl InitSpec {
    pub fn resolved_kind(&self, method: Method) -> InitKind {
        self.kind.unwrap_or(match method {
            Method::Csg | Method::UncontrolledSwarm => InitKind::UncontrolledSwarm,
            Method::Csa | Method::Langevin => InitKind::Langevin,
        })
    }

    pub fn burn_in(&self) -> BurnIn {
        BurnIn { steps: self.burn_in_steps, dt: self.burn_in_dt }
    }
}

/// A complete experiment: `n_runs` independent runs of one method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub method: Method,
    pub potential: PotentialKind,
    pub schedule: CoolingSchedule,
    #[serde(default = "defaults::m")]
    pub m: f64,
    #[serde(default = "defaults::kappa")]
    pub kappa: f64,
    #[serde(default = "defaults::n_particles")]
    pub n_particles: usize,
    #[serde(default = "defaults::n_runs")]
    pub n_runs: usize,
    #[serde(default = "defaults::dt")]
    pub dt: f64,
    #[serde(default = "defaults::k")]
    pub k: usize,
    #[serde(rename = "T", alias = "t_final", default = "defaults::t_final")]
    pub t_final: f64,
    #[serde(default = "defaults::noise_factor")]
    pub noise_factor: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub init: InitSpec,
    #[serde(default = "defaults::output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "defaults::record_every")]
    pub record_every: usize,
    #[serde(default = "defaults::c_tol")]
    pub c_tol: f64,
    #[serde(default = "defaults::c_bracket_expansions")]
    pub c_bracket_expansions: usize,
    #[serde(default = "defaults::ot_tolerance")]
    pub ot_tolerance: f64,
    /// Estimate the velocity field; `false` gives the plain annealed SDE.
    #[serde(default = "defaults::control")]
    pub control: bool,
}

mod defaults {
    use std::path::PathBuf;

    pub fn m() -> f64 {
        2.0
    }
    pub fn kappa() -> f64 {
        1.0
    }
    pub fn n_particles() -> usize {
        100
    }
    pub fn n_runs() -> usize {
        1
    }
    pub fn dt() -> f64 {
        0.002
    }
    pub fn k() -> usize {
        20
    }
    pub fn t_final() -> f64 {
        1.0
    }
    pub fn noise_factor() -> f64 {
        2.0
    }
    pub fn output_dir() -> PathBuf {
        PathBuf::from("out")
    }
    pub fn record_every() -> usize {
        5
    }
    pub fn c_tol() -> f64 {
        1e-8
    }
    pub fn c_bracket_expansions() -> usize {
        60
    }
    pub fn ot_tolerance() -> f64 {
        super::DEFAULT_OT_TOLERANCE
    }
    pub fn control() -> bool {
        true
    }
}

impl RunConfig {
    /// Defaults for everything but the three required keys.
    pub fn new(method: Method, potential: PotentialKind, schedule: CoolingSchedule) -> Self {
        Self {
            method,
            potential,
            schedule,
            m: defaults::m(),
            kappa: defaults::kappa(),
            n_particles: defaults::n_particles(),
            n_runs: defaults::n_runs(),
            dt: defaults::dt(),
            k: defaults::k(),
            t_final: defaults::t_final(),
            noise_factor: defaults::noise_factor(),
            seed: 0,
            init: InitSpec::default(),
            output_dir: defaults::output_dir(),
            record_every: defaults::record_every(),
            c_tol: defaults::c_tol(),
            c_bracket_expansions: defaults::c_bracket_expansions(),
            ot_tolerance: defaults::ot_tolerance(),
            control: defaults::control(),
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn spec(&self) -> IntegratorSpec {
        IntegratorSpec {
            dt: self.dt,
            k: self.k,
            t_final: self.t_final,
            noise_factor: self.noise_factor,
            method: self.method,
        }
    }

    pub fn solver(&self) -> CSolver {
        CSolver { tol: self.c_tol, max_expansions: self.c_bracket_expansions }
    }

    /// Checks ranges and cross-field consistency.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        self.schedule.validate()?;
        if !(self.m > 1.0 && self.m.is_finite()) {
            return bad(format!("m must be > 1, got {}", self.m));
        }
        if self.kappa != 1.0 && self.kappa != 2.0 {
            return bad(format!("kappa must be 1 or 2, got {}", self.kappa));
        }
        if self.n_particles == 0 || self.n_runs == 0 {
            return bad("n_particles and n_runs must be >= 1".into());
        }
        if self.record_every == 0 {
            return bad("record_every must be >= 1".into());
        }
        if !(self.c_tol > 0.0) || !(self.ot_tolerance > 0.0) {
            return bad("c_tol and ot_tolerance must be > 0".into());
        }
        self.spec().validate()?;
        if self.method.uses_c() || self.init.resolved_kind(self.method) == InitKind::UncontrolledSwarm {
            let beta0 = self.schedule.beta(0.0)?;
            if !(beta0 > 0.0) {
                return bad(format!("the swarm density needs beta(0) > 0, got {beta0}"));
            }
        }
        let dim = self.potential.build().dim();
        match self.init.resolved_kind(self.method) {
            InitKind::Mixture => {
                if self.init.centers.is_empty() {
                    return bad("mixture init needs `init.centers`".into());
                }
                if self.init.centers.iter().any(|c| c.len() != dim) {
                    return bad(format!("mixture centers must have dimension {dim}"));
                }
                if !(self.init.cov_scale > 0.0) {
                    return bad("init.cov_scale must be > 0".into());
                }
            }
            InitKind::UncontrolledSwarm | InitKind::Langevin => {
                if !(self.init.burn_in_dt > 0.0) {
                    return bad("init.burn_in_dt must be > 0".into());
                }
                if !(self.schedule.beta(0.0)? > 0.0) {
                    return bad("fixed-temperature burn-in needs beta(0) > 0".into());
                }
            }
            InitKind::Uniform => {}
        }
        if let Some(r) = self.init.reference_size {
            if r < self.n_particles {
                return bad(format!("init.reference_size ({r}) is smaller than n_particles ({})", self.n_particles));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"
method = "csg"
potential = "double_well"
schedule = { kind = "quadratic", beta0 = 0.25, rate = 25.0 }
m = 2.0
n_particles = 100
n_runs = 20
dt = 0.002
k = 20
T = 1.0
seed = 7

[init]
kind = "uncontrolled_swarm"
burn_in_steps = 500
"#;

    #[test]
    fn parses_and_fills_defaults() {
        let cfg = RunConfig::from_toml_str(EXAMPLE).unwrap();
        assert_eq!(cfg.method, Method::Csg);
        assert_eq!(cfg.schedule, CoolingSchedule::quadratic(0.25, 25.0));
        assert_eq!(cfg.t_final, 1.0);
        assert_eq!(cfg.c_tol, 1e-8);
        assert_eq!(cfg.c_bracket_expansions, 60);
        assert_eq!(cfg.ot_tolerance, 1e-9);
        assert_eq!(cfg.noise_factor, 2.0);
        assert_eq!(cfg.init.burn_in_steps, 500);
        assert!(cfg.control);
        cfg.validate().unwrap();
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = RunConfig::from_toml_str(EXAMPLE).unwrap();
        let again = RunConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(RunConfig::from_toml_str("method = \"sgd\"\npotential = \"double_well\"").is_err());
        let mut cfg = RunConfig::from_toml_str(EXAMPLE).unwrap();
        cfg.m = 1.0;
        assert!(cfg.validate().unwrap_err().is_config());
        let mut cfg = RunConfig::from_toml_str(EXAMPLE).unwrap();
        cfg.t_final = 0.0011;
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::from_toml_str(EXAMPLE).unwrap();
        cfg.init.kind = Some(InitKind::Mixture);
        assert!(cfg.validate().is_err());
        assert!(RunConfig::from_toml_str(&format!("{EXAMPLE}\nbogus = 1")).is_err());
    }
}
