//! Controlled swarm gradient dynamics for global optimization.
//!
//! The crate integrates a particle system whose marginal law is steered
//! along an explicit annealing curve of Lambert-W densities, together with
//! controlled simulated annealing on the Gibbs curve as a baseline.
//!
//! Module map:
//! - [`scalar_math`]: Lambert `W_0`, Brent root finding
//! - [`schedule`]: cooling schedules `beta(t)`
//! - [`potentials`]: benchmark objectives
//! - [`density`]: the invariant density, `alpha`, the weight `a`, Gibbs
//! - [`normalization`]: the normalization constant `C(t)`
//! - [`transport`]: importance weights, exact discrete OT, velocity estimates
//! - [`dynamics`]: the particle integrators and initializers
//! - [`experiments`]: run configuration, aggregation, validation suites

pub mod density;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod normalization;
mod points;
pub mod potentials;
pub mod scalar_math;
pub mod schedule;
pub mod transport;

pub use error::{Error, Result};
pub use points::Points;
