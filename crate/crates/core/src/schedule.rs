//! Polynomial cooling schedules `beta(t) = beta0 + rate * t^exponent`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    Constant,
    Linear,
    Quadratic,
    #[serde(alias = "custom_polynomial", alias = "custom")]
    CustomPolynomial,
}

/// Inverse-temperature curve with an exact derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "ScheduleRepr")]
pub struct CoolingSchedule {
    pub kind: ScheduleKind,
    pub beta0: f64,
    pub rate: f64,
    /// Implied by `kind` except for [`ScheduleKind::CustomPolynomial`].
    pub exponent: u32,
}

#[derive(Deserialize)]
struct ScheduleRepr {
    kind: ScheduleKind,
    beta0: f64,
    #[serde(default)]
    rate: f64,
    #[serde(default = "default_exponent")]
    exponent: u32,
}

fn default_exponent() -> u32 {
    1
}

impl From<ScheduleRepr> for CoolingSchedule {
    fn from(r: ScheduleRepr) -> Self {
        match r.kind {
            ScheduleKind::Constant => Self::constant(r.beta0),
            ScheduleKind::Linear => Self::linear(r.beta0, r.rate),
            ScheduleKind::Quadratic => Self::quadratic(r.beta0, r.rate),
            ScheduleKind::CustomPolynomial => Self::polynomial(r.beta0, r.rate, r.exponent),
        }
    }
}

impl CoolingSchedule {
    pub fn constant(beta0: f64) -> Self {
        Self { kind: ScheduleKind::Constant, beta0, rate: 0.0, exponent: 0 }
    }

    pub fn linear(beta0: f64, rate: f64) -> Self {
        Self { kind: ScheduleKind::Linear, beta0, rate, exponent: 1 }
    }

    pub fn quadratic(beta0: f64, rate: f64) -> Self {
        Self { kind: ScheduleKind::Quadratic, beta0, rate, exponent: 2 }
    }

    pub fn polynomial(beta0: f64, rate: f64, exponent: u32) -> Self {
        Self { kind: ScheduleKind::CustomPolynomial, beta0, rate, exponent }
    }

    fn power(&self) -> Option<u32> {
        match self.kind {
            ScheduleKind::Constant => None,
            ScheduleKind::Linear => Some(1),
            ScheduleKind::Quadratic => Some(2),
            ScheduleKind::CustomPolynomial => Some(self.exponent),
        }
    }

    /// Checks the field ranges. Returns `true` when `beta0 < 1`, which the
    /// convergence theory excludes but the reference experiments use.
    pub fn validate(&self) -> Result<bool> {
        if !(self.beta0.is_finite() && self.beta0 >= 0.0) {
            return Err(Error::Config(format!("schedule beta0 must be >= 0, got {}", self.beta0)));
        }
        if !(self.rate.is_finite() && self.rate >= 0.0) {
            return Err(Error::Config(format!("schedule rate must be >= 0, got {}", self.rate)));
        }
        if self.kind == ScheduleKind::CustomPolynomial && self.exponent == 0 {
            return Err(Error::Config("custom-polynomial exponent must be positive".into()));
        }
        let below_one = self.beta0 < 1.0;
        if below_one {
            log::warn!(
                "beta0 = {} < 1: outside the range covered by the convergence theory",
                self.beta0
            );
        }
        Ok(below_one)
    }

    pub fn beta(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(match self.power() {
            None => self.beta0,
            Some(p) => self.beta0 + self.rate * t.powi(p as i32),
        })
    }

    pub fn beta_prime(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(match self.power() {
            None | Some(0) => 0.0,
            Some(1) => self.rate,
            Some(p) => self.rate * p as f64 * t.powi(p as i32 - 1),
        })
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("schedule time must be finite and >= 0, got {t}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        let q = CoolingSchedule::quadratic(0.25, 25.0);
        assert_eq!(q.beta(0.0).unwrap(), 0.25);
        assert_eq!(q.beta(1.0).unwrap(), 25.25);
        assert_eq!(CoolingSchedule::linear(0.25, 25.0).beta(0.5).unwrap(), 12.75);
    }

    #[test]
    fn derivatives() {
        assert_eq!(CoolingSchedule::constant(5.0).beta_prime(3.0).unwrap(), 0.0);
        assert_eq!(CoolingSchedule::linear(0.25, 25.0).beta_prime(0.3).unwrap(), 25.0);
        assert!((CoolingSchedule::quadratic(0.25, 25.0).beta_prime(0.1).unwrap() - 5.0).abs() < 1e-12);
        assert!((CoolingSchedule::polynomial(1.0, 2.0, 3).beta_prime(2.0).unwrap() - 24.0).abs() < 1e-12);
    }

    #[test]
    fn negative_time_is_rejected() {
        assert!(CoolingSchedule::linear(1.0, 1.0).beta(-0.1).is_err());
        assert!(CoolingSchedule::linear(1.0, 1.0).beta_prime(-0.1).is_err());
    }

    #[test]
    fn low_beta0_is_flagged_not_rejected() {
        assert!(CoolingSchedule::quadratic(0.25, 25.0).validate().unwrap());
        assert!(!CoolingSchedule::quadratic(1.0, 25.0).validate().unwrap());
        assert!(CoolingSchedule::linear(-1.0, 1.0).validate().is_err());
    }

    #[test]
    fn central_difference_matches_derivative() {
        let h = 1e-6;
        for s in [
            CoolingSchedule::constant(2.0),
            CoolingSchedule::linear(0.25, 25.0),
            CoolingSchedule::quadratic(0.25, 25.0),
            CoolingSchedule::polynomial(0.5, 3.0, 4),
        ] {
            for i in 1..20 {
                let t = i as f64 * 0.05;
                let fd = (s.beta(t + h).unwrap() - s.beta(t - h).unwrap()) / (2.0 * h);
                let exact = s.beta_prime(t).unwrap();
                assert!(exact >= 0.0);
                assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0), "{s:?} t={t}");
            }
        }
    }

    #[test]
    fn parses_config_table() {
        let s: CoolingSchedule =
            toml::from_str("kind = \"quadratic\"\nbeta0 = 0.25\nrate = 25.0\n").unwrap();
        assert_eq!(s.kind, ScheduleKind::Quadratic);
        assert_eq!(s.beta(1.0).unwrap(), 25.25);
        let s: CoolingSchedule =
            toml::from_str("kind = \"custom-polynomial\"\nbeta0 = 1.0\nrate = 2.0\nexponent = 3\n").unwrap();
        assert_eq!(s.beta(1.0).unwrap(), 3.0);
    }
}
