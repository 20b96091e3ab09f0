//! The swarm invariant density and the quantities derived from it.
//!
//! With `z = ln m + m - kappa (m-1) beta (u - C)` and `w = W_0(e^z)`:
//!
//! * `rho = (w / m)^(1/(m-1))`, so `rho^(m-1) = w / m` and
//!   `ln rho = (z - w - ln m) / (m-1)` (using `ln w = z - w`);
//! * `a = 1 / (1 + w)`.
//!
//! Nothing here exponentiates the Lambert argument itself.

use crate::error::{Error, Result};
use crate::scalar_math::lambert_w0_exp;

/// Parameters of `rho(x; m, beta, C)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityParams {
    pub m: f64,
    pub beta: f64,
    pub c: f64,
    /// Exponent factor: 1 for the dynamics, 2 for the `m -> 1` Gibbs limit.
    pub kappa: f64,
}

impl DensityParams {
    pub fn new(m: f64, beta: f64, c: f64) -> Self {
        Self { m, beta, c, kappa: 1.0 }
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m > 1.0 && self.m.is_finite()) {
            return Err(Error::Domain(format!("m must be > 1, got {}", self.m)));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::Domain(format!("beta must be > 0, got {}", self.beta)));
        }
        if self.kappa != 1.0 && self.kappa != 2.0 {
            return Err(Error::Domain(format!("kappa must be 1 or 2, got {}", self.kappa)));
        }
        if !self.c.is_finite() {
            return Err(Error::Domain("normalization constant must be finite".into()));
        }
        Ok(())
    }

    /// Lambert value `w = W_0(g)` at potential value `u`.
    fn lambert(&self, u: f64) -> f64 {
        // log_g is finite whenever the parameters and u are.
        lambert_w0_exp(log_g(self, u)).unwrap_or(f64::NAN)
    }
}

/// `ln g = ln m + m - kappa (m-1) beta (u - C)`.
pub fn log_g(p: &DensityParams, u: f64) -> f64 {
    p.m.ln() + p.m - p.kappa * (p.m - 1.0) * p.beta * (u - p.c)
}

pub fn rho(p: &DensityParams, u: f64) -> f64 {
    log_rho(p, u).exp()
}

pub fn log_rho(p: &DensityParams, u: f64) -> f64 {
    let z = log_g(p, u);
    let w = p.lambert(u);
    (z - w - p.m.ln()) / (p.m - 1.0)
}

/// `rho^(m-1) = W_0(g) / m`, the term that enters `alpha`.
pub fn rho_pow_m_minus_1(p: &DensityParams, u: f64) -> f64 {
    p.lambert(u) / p.m
}

/// `a = 1 / (1 + W_0(g))`.
pub fn weight_a(p: &DensityParams, u: f64) -> f64 {
    1.0 / (1.0 + p.lambert(u))
}

/// Lower bound of `weight_a` over `u >= 0`.
pub fn weight_a_lower_bound(p: &DensityParams) -> f64 {
    weight_a(p, 0.0)
}

/// Diffusion modulation `alpha(r) = 1 + r^(m-1)`.
pub fn alpha_mod(r: f64, m: f64) -> f64 {
    if r == 0.0 {
        1.0
    } else {
        1.0 + r.powf(m - 1.0)
    }
}

/// `alpha(rho(u))` without the round trip through `rho`.
pub fn alpha_at(p: &DensityParams, u: f64) -> f64 {
    1.0 + rho_pow_m_minus_1(p, u)
}

/// `exp(-beta u)`, zero once the exponent drops below -700.
pub fn gibbs_unnormalized(beta: f64, u: f64) -> f64 {
    let e = -beta * u;
    if e < -700.0 {
        0.0
    } else {
        e.exp()
    }
}
