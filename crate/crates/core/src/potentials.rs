//! Benchmark objectives with analytic gradients.
//!
//! New objectives are added by implementing [`Potential`]; there is no
//! expression parser because the dynamics need exact gradients.

use serde::{Deserialize, Serialize};

/// Axis-aligned box `[lo_j, hi_j]` per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl DomainBox {
    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).product()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (l, h))| *v >= *l && *v <= *h)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalMinimum {
    pub point: Vec<f64>,
    pub value: f64,
}

/// Objective `U: R^d -> R`.
pub trait Potential: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    /// Writes `grad U(x)` into `out` (length `dim`).
    fn grad(&self, x: &[f64], out: &mut [f64]);
    fn global_minima(&self) -> Vec<GlobalMinimum>;
    fn domain_box(&self) -> DomainBox;
    fn name(&self) -> &str;
}

/// One-dimensional piecewise double well: global minimum at 4, local at -3.
#[derive(Debug, Clone, Copy, Default)]
pub struct DoubleWell;

/// Branch points where the double-well gradient jumps.
pub const DOUBLE_WELL_KNOTS: [f64; 4] = [-6.0, -2.0, 2.0, 6.0];

pub fn double_well_1d(x: f64) -> f64 {
    if x <= -6.0 {
        -12.0 * x - 52.0
    } else if x < -2.0 {
        2.0 * (x + 3.0) * (x + 3.0) + 2.0
    } else if x <= 2.0 {
        8.0 - x * x
    } else if x <= 6.0 {
        (x - 4.0) * (x - 4.0)
    } else {
        4.0 * x - 20.0
    }
}

/// Derivative of [`double_well_1d`]; at a knot the branch whose inequality is
/// closed there is used.
pub fn double_well_1d_grad(x: f64) -> f64 {
    if x <= -6.0 {
        -12.0
    } else if x < -2.0 {
        4.0 * (x + 3.0)
    } else if x <= 2.0 {
        -2.0 * x
    } else if x <= 6.0 {
        2.0 * (x - 4.0)
    } else {
        4.0
    }
}

impl Potential for DoubleWell {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, x: &[f64]) -> f64 {
        double_well_1d(x[0])
    }

    fn grad(&self, x: &[f64], out: &mut [f64]) {
        out[0] = double_well_1d_grad(x[0]);
    }

    fn global_minima(&self) -> Vec<GlobalMinimum> {
        vec![GlobalMinimum { point: vec![4.0], value: 0.0 }]
    }

    fn domain_box(&self) -> DomainBox {
        DomainBox { lo: vec![-8.0], hi: vec![8.0] }
    }

    fn name(&self) -> &str {
        "double_well"
    }
}

/// Six-hump camel function shifted by `+1.0316` so its minima sit at ~0.
#[derive(Debug, Clone, Copy, Default)]
pub struct SixHumpCamel;

pub const CAMEL_SHIFT: f64 = 1.0316;

pub fn six_hump_camel(x1: f64, x2: f64) -> f64 {
    let x1s = x1 * x1;
    let x2s = x2 * x2;
    (4.0 - 2.1 * x1s + x1s * x1s / 3.0) * x1s + x1 * x2 + (4.0 * x2s - 4.0) * x2s + CAMEL_SHIFT
}

impl Potential for SixHumpCamel {
    fn dim(&self) -> usize {
        2
    }

    fn value(&self, x: &[f64]) -> f64 {
        six_hump_camel(x[0], x[1])
    }

    fn grad(&self, x: &[f64], out: &mut [f64]) {
        let (x1, x2) = (x[0], x[1]);
        let x1s = x1 * x1;
        out[0] = 8.0 * x1 - 8.4 * x1s * x1 + 2.0 * x1s * x1s * x1 + x2;
        out[1] = x1 - 8.0 * x2 + 16.0 * x2 * x2 * x2;
    }

    fn global_minima(&self) -> Vec<GlobalMinimum> {
        vec![
            GlobalMinimum { point: vec![0.0898, -0.7126], value: 0.0 },
            GlobalMinimum { point: vec![-0.0898, 0.7126], value: 0.0 },
        ]
    }

    fn domain_box(&self) -> DomainBox {
        DomainBox { lo: vec![-3.0, -2.0], hi: vec![3.0, 2.0] }
    }

    fn name(&self) -> &str {
        "six_hump_camel"
    }
}

/// Built-in objectives selectable from configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    #[serde(alias = "double-well")]
    DoubleWell,
    #[serde(alias = "six-hump-camel", alias = "camel")]
    SixHumpCamel,
}

impl PotentialKind {
    pub fn build(self) -> Box<dyn Potential> {
        match self {
            PotentialKind::DoubleWell => Box::new(DoubleWell),
            PotentialKind::SixHumpCamel => Box::new(SixHumpCamel),
        }
    }
}

impl std::str::FromStr for PotentialKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "double_well" | "double-well" => Ok(Self::DoubleWell),
            "six_hump_camel" | "six-hump-camel" | "camel" => Ok(Self::SixHumpCamel),
            other => Err(format!("unknown potential `{other}`")),
        }
    }
}

/// Evaluates `U` on every row.
pub fn values(pot: &dyn Potential, points: &crate::Points) -> Vec<f64> {
    points.rows().map(|x| pot.value(x)).collect()
}
