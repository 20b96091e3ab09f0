use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use swarm_anneal::dynamics::Method;
use swarm_anneal::experiments::{InitKind, RunConfig};
use swarm_anneal::potentials::PotentialKind;
use swarm_anneal::schedule::{CoolingSchedule, ScheduleKind};
use swarm_anneal::{Error, Result};

#[derive(Parser)]
#[command(name = "swarm-anneal", version, about = "Controlled swarm gradient dynamics and controlled simulated annealing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Execute all runs of an experiment and write CSV artifacts.
    Run(RunArgs),
    /// Draw the initial (reference) ensemble only.
    InitSample(RunArgs),
    /// Run numerical self-checks.
    Validate(ValidateArgs),
    /// Rebuild heatmaps and min-U curves from trajectory CSVs.
    Aggregate(AggregateArgs),
}

#[derive(Args)]
pub struct RunArgs {
    /// TOML configuration; flags below override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for independent runs (capped by SWARM_ANNEAL_WORKERS).
    #[arg(long)]
    pub workers: Option<usize>,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Args, Default)]
pub struct Overrides {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub method: Option<Method>,
    #[arg(long)]
    pub potential: Option<PotentialKind>,
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub n_particles: Option<usize>,
    #[arg(long)]
    pub n_runs: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Final time.
    #[arg(long = "T", alias = "t-final")]
    pub t_final: Option<f64>,
    #[arg(long)]
    pub noise_factor: Option<f64>,
    #[arg(long)]
    pub record_every: Option<usize>,
    /// constant | linear | quadratic | custom-polynomial
    #[arg(long, value_parser = parse_schedule_kind)]
    pub schedule_kind: Option<ScheduleKind>,
    #[arg(long)]
    pub beta0: Option<f64>,
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long)]
    pub exponent: Option<u32>,
    /// uncontrolled_swarm | langevin | mixture | uniform
    #[arg(long)]
    pub init: Option<InitKind>,
    #[arg(long)]
    pub burn_in_steps: Option<usize>,
    #[arg(long)]
    pub burn_in_dt: Option<f64>,
    #[arg(long)]
    pub reference_size: Option<usize>,
    #[arg(long)]
    pub reference_seed: Option<u64>,
    #[arg(long)]
    pub c_tol: Option<f64>,
    #[arg(long)]
    pub c_bracket_expansions: Option<usize>,
    #[arg(long)]
    pub ot_tolerance: Option<f64>,
    /// Disable the velocity field (plain annealed dynamics).
    #[arg(long)]
    pub no_control: bool,
}

fn parse_schedule_kind(s: &str) -> std::result::Result<ScheduleKind, String> {
    match s {
        "constant" => Ok(ScheduleKind::Constant),
        "linear" => Ok(ScheduleKind::Linear),
        "quadratic" => Ok(ScheduleKind::Quadratic),
        "custom-polynomial" | "custom_polynomial" | "custom" => Ok(ScheduleKind::CustomPolynomial),
        other => Err(format!("unknown schedule kind `{other}`")),
    }
}

impl RunArgs {
    /// Config file (or defaults) with every override applied.
    pub fn resolve(&self) -> Result<RunConfig> {
        let o = &self.overrides;
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => {
                let (Some(method), Some(potential)) = (o.method, o.potential) else {
                    return Err(Error::Config("without --config, --method and --potential are required".into()));
                };
                RunConfig::new(method, potential, CoolingSchedule::quadratic(0.25, 25.0))
            }
        };
        macro_rules! set {
            ($($field:ident),*) => { $( if let Some(v) = o.$field { cfg.$field = v; } )* };
        }
        set!(seed, method, potential, m, kappa, n_particles, n_runs, dt, k, t_final, noise_factor, record_every);
        set!(c_tol, c_bracket_expansions, ot_tolerance);
        let s = &mut cfg.schedule;
        let kind = o.schedule_kind.unwrap_or(s.kind);
        let beta0 = o.beta0.unwrap_or(s.beta0);
        let rate = o.rate.unwrap_or(s.rate);
        *s = match kind {
            ScheduleKind::Constant => CoolingSchedule::constant(beta0),
            ScheduleKind::Linear => CoolingSchedule::linear(beta0, rate),
            ScheduleKind::Quadratic => CoolingSchedule::quadratic(beta0, rate),
            ScheduleKind::CustomPolynomial => CoolingSchedule::polynomial(beta0, rate, o.exponent.unwrap_or(s.exponent)),
        };
        if let Some(kind) = o.init {
            cfg.init.kind = Some(kind);
        }
        if let Some(v) = o.burn_in_steps {
            cfg.init.burn_in_steps = v;
        }
        if let Some(v) = o.burn_in_dt {
            cfg.init.burn_in_dt = v;
        }
        if o.reference_size.is_some() {
            cfg.init.reference_size = o.reference_size;
        }
        if o.reference_seed.is_some() {
            cfg.init.reference_seed = o.reference_seed;
        }
        if o.no_control {
            cfg.control = false;
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
pub struct ValidateArgs {
    /// lambert | weak-convergence | gibbs-limit | c-derivative | transport | all
    #[arg(default_value = "all")]
    pub suite: String,
}

#[derive(Args)]
pub struct AggregateArgs {
    /// Trajectory CSV files, or directories holding `run_*.csv`.
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Coordinate for the heatmap (0-based).
    #[arg(long, default_value_t = 0)]
    pub axis: usize,
    #[arg(long, default_value_t = 50)]
    pub t_bins: usize,
    #[arg(long, default_value_t = 64)]
    pub x_bins: usize,
    /// Heatmap range; defaults to the data range.
    #[arg(long, allow_hyphen_values = true)]
    pub x_lo: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x_hi: Option<f64>,
    /// Particles per run entering the min-U curve; defaults to all.
    #[arg(long)]
    pub subset_size: Option<usize>,
}
