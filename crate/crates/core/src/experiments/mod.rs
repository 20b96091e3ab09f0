//! Experiment configuration, multi-run execution, aggregation, artifacts
//! and the validation suites.

mod aggregate;
mod config;
pub mod output;
mod runner;
mod validate;

pub use aggregate::{aggregate_heatmap, final_fraction_in, median, median_min_u_curve, Bins, Heatmap};
pub use config::{InitKind, InitSpec, RunConfig};
pub use runner::{
    draw_initial, reference_ensemble, resolve_workers, run_many, run_one, run_seed, RunOutput, WORKERS_ENV,
};
pub use validate::{
    c_derivative_pair, gibbs_limit_error, validate, weak_convergence_masses, Check, Report, SUITES,
};
