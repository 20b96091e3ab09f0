//! Tracking the normalization constant `C(t)`.
//!
//! Two estimators share one root-finding core: the empirical one (mean of
//! `rho` over the particles equals one) used by the dynamics, and a
//! trapezoid-rule one (integral of `rho` equals one) used as an oracle.

use crate::density::{self, DensityParams};
use crate::error::{Error, Result};
use crate::potentials::{self, DomainBox, Potential};
use crate::scalar_math::{find_root, BracketedFn};
use crate::schedule::CoolingSchedule;
use crate::Points;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CMethod {
    Empirical,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CState {
    pub c: f64,
    pub t: f64,
    pub method: CMethod,
    /// Normalization defect at the returned `c`.
    pub residual: f64,
}

/// Root-finder settings for `C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CSolver {
    /// Tolerance on the normalization defect.
    pub tol: f64,
    /// Maximum number of bracket doublings.
    pub max_expansions: usize,
}

impl Default for CSolver {
    fn default() -> Self {
        Self { tol: 1e-8, max_expansions: 60 }
    }
}

/// `sum_i w_i rho(u_i; C) - 1`.
pub fn weighted_defect(us: &[f64], weights: &[f64], p: &DensityParams, c: f64) -> f64 {
    let p = p.with_c(c);
    us.iter().zip(weights).map(|(&u, &w)| w * density::rho(&p, u)).sum::<f64>() - 1.0
}

fn mean_defect(us: &[f64], p: &DensityParams, c: f64) -> f64 {
    let p = p.with_c(c);
    us.iter().map(|&u| density::rho(&p, u)).sum::<f64>() / us.len() as f64 - 1.0
}

/// Solves `defect(C) = 0` for a defect increasing in `C`, starting from
/// `[lo, hi]` and doubling whichever side fails to bracket.
fn solve_increasing<F: FnMut(f64) -> f64>(
    mut defect: F,
    lo: f64,
    hi: f64,
    solver: &CSolver,
) -> Result<(f64, f64)> {
    let (mut lo, mut hi) = (lo, hi);
    let mut f_lo = defect(lo);
    let mut f_hi = defect(hi);
    let mut expansions = 0;
    while f_lo > 0.0 {
        if expansions == solver.max_expansions {
            return Err(Error::BracketExhausted { lo, hi, expansions, f_lo, f_hi });
        }
        lo -= (hi - lo).max(1.0);
        f_lo = defect(lo);
        expansions += 1;
    }
    while f_hi < 0.0 {
        if expansions == solver.max_expansions {
            return Err(Error::BracketExhausted { lo, hi, expansions, f_lo, f_hi });
        }
        hi = lo + 2.0 * (hi - lo).max(1.0);
        f_hi = defect(hi);
        expansions += 1;
    }
    if f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::Estimation(format!("non-finite defect on [{lo}, {hi}]")));
    }
    let c = find_root(BracketedFn::new(&mut defect, lo, hi, solver.tol).with_x_tol(0.0))?;
    Ok((c, defect(c)))
}

/// Empirical estimator on precomputed potential values: the `C` at which
/// the mean of `rho` over the sample is one. `hint` (a previous root) narrows
/// the first bracket.
pub fn estimate_c_from_values(
    us: &[f64],
    p: &DensityParams,
    solver: &CSolver,
    hint: Option<f64>,
) -> Result<(f64, f64)> {
    if us.is_empty() {
        return Err(Error::Estimation("empty particle set".into()));
    }
    let (u_min, u_max) = us.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &u| (a.min(u), b.max(u)));
    if !(u_min.is_finite() && u_max.is_finite()) {
        return Err(Error::Estimation("non-finite potential value in sample".into()));
    }
    let defect = |c: f64| mean_defect(us, p, c);
    if let Some(h) = hint.filter(|h| h.is_finite()) {
        let half = 0.05 * (1.0 + h.abs());
        let (lo, hi) = ((h - half).max(u_min.min(0.0)), h + half);
        if defect(lo) <= 0.0 && defect(hi) >= 0.0 {
            let c = find_root(BracketedFn::new(defect, lo, hi, solver.tol).with_x_tol(0.0))?;
            return Ok((c, defect(c)));
        }
    }
    // rho(u = C) = 1 and rho decreases in u, so the root lies in [min u, max u].
    solve_increasing(defect, u_min.min(0.0), u_max + 1.0, solver).map_err(|e| match e {
        Error::BracketExhausted { .. } => Error::Estimation(format!("{e}; sample u in [{u_min}, {u_max}]")),
        other => other,
    })
}

/// Root of `C -> mean_i rho(X_i; C) - 1`. `p.c` is ignored.
pub fn estimate_c_empirical(
    particles: &Points,
    pot: &dyn Potential,
    p: &DensityParams,
    t: f64,
    solver: &CSolver,
) -> Result<CState> {
    let us = potentials::values(pot, particles);
    let (c, residual) = estimate_c_from_values(&us, p, solver, None)?;
    Ok(CState { c, t, method: CMethod::Empirical, residual })
}

/// Root of `C -> sum_i w_i rho(u_i; C) - 1` for arbitrary nonnegative
/// weights (e.g. quadrature weights).
pub fn estimate_c_weighted(us: &[f64], weights: &[f64], p: &DensityParams, solver: &CSolver) -> Result<(f64, f64)> {
    if us.is_empty() || us.len() != weights.len() {
        return Err(Error::Estimation("values and weights must be nonempty and equally long".into()));
    }
    let (u_min, u_max) = us.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &u| (a.min(u), b.max(u)));
    solve_increasing(|c| weighted_defect(us, weights, p, c), u_min.min(0.0), u_max + 1.0, solver)
}

/// Tensor-product grid with trapezoid weights, in one or two dimensions.
#[derive(Debug, Clone)]
pub struct TensorGrid {
    pub points: Points,
    pub weights: Vec<f64>,
}

fn trapezoid_axis(lo: f64, hi: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2, "a trapezoid axis needs at least two nodes");
    let h = (hi - lo) / (n - 1) as f64;
    let xs = (0..n).map(|i| lo + h * i as f64).collect();
    let ws = (0..n).map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h }).collect();
    (xs, ws)
}

impl TensorGrid {
    /// `counts[j]` nodes along axis `j` of `domain`.
    pub fn over_box(domain: &DomainBox, counts: &[usize]) -> Result<Self> {
        match (domain.dim(), counts) {
            (1, &[n]) => {
                let (xs, ws) = trapezoid_axis(domain.lo[0], domain.hi[0], n);
                Ok(Self { points: Points::from_scalars(&xs), weights: ws })
            }
            (2, &[nx, ny]) => {
                let (xs, wx) = trapezoid_axis(domain.lo[0], domain.hi[0], nx);
                let (ys, wy) = trapezoid_axis(domain.lo[1], domain.hi[1], ny);
                let mut data = Vec::with_capacity(2 * nx * ny);
                let mut weights = Vec::with_capacity(nx * ny);
                for (x, a) in xs.iter().zip(&wx) {
                    for (y, b) in ys.iter().zip(&wy) {
                        data.extend_from_slice(&[*x, *y]);
                        weights.push(a * b);
                    }
                }
                Ok(Self { points: Points::new(2, data), weights })
            }
            (d, c) => Err(Error::Domain(format!(
                "quadrature grids support 1 or 2 dimensions with one count per axis (dim {d}, counts {c:?})"
            ))),
        }
    }

    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.points.rows().zip(&self.weights).map(|(x, w)| w * f(x)).sum()
    }
}

/// Potential values on a quadrature grid, computed once and reused across
/// several `(beta, C)` evaluations.
#[derive(Debug, Clone)]
pub struct GridValues {
    pub us: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GridValues {
    pub fn new(pot: &dyn Potential, grid: &TensorGrid) -> Self {
        Self { us: potentials::values(pot, &grid.points), weights: grid.weights.clone() }
    }

    pub fn fit_c(&self, p: &DensityParams, solver: &CSolver) -> Result<(f64, f64)> {
        estimate_c_weighted(&self.us, &self.weights, p, solver)
    }

    /// Integral of `rho(.; p)` over the grid cells where `keep(u_index)` holds.
    pub fn mass_where(&self, p: &DensityParams, keep: impl Fn(usize) -> bool) -> f64 {
        (0..self.us.len()).filter(|&i| keep(i)).map(|i| self.weights[i] * density::rho(p, self.us[i])).sum()
    }

    /// `C'(t)` from the weighted-expectation formula with the quadrature
    /// measure `rho dx` in place of the particle sample.
    pub fn c_derivative(&self, p: &DensityParams, beta_prime: f64) -> f64 {
        let w: Vec<f64> = self.us.iter().zip(&self.weights).map(|(&u, &q)| q * density::rho(p, u)).collect();
        c_derivative_weighted(&self.us, &w, p, beta_prime)
    }
}

/// Trapezoid-rule oracle: `C` with `integral rho(.; C) = 1` over `grid`.
pub fn fit_c_quadrature(
    pot: &dyn Potential,
    p: &DensityParams,
    grid: &TensorGrid,
    t: f64,
    solver: &CSolver,
) -> Result<CState> {
    let (c, residual) = GridValues::new(pot, grid).fit_c(p, solver)?;
    Ok(CState { c, t, method: CMethod::Quadrature, residual })
}

/// `(beta'/beta) * sum_i w_i (u_i - C) a_i / sum_i w_i a_i`.
pub fn c_derivative_weighted(us: &[f64], weights: &[f64], p: &DensityParams, beta_prime: f64) -> f64 {
    if beta_prime == 0.0 {
        return 0.0;
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (&u, &w) in us.iter().zip(weights) {
        let a = density::weight_a(p, u);
        num += w * (u - p.c) * a;
        den += w * a;
    }
    beta_prime / p.beta * num / den
}

/// Coarse estimate of `C'(t)` from a particle sample of `rho_t`.
pub fn coarse_c_derivative(
    particles: &Points,
    pot: &dyn Potential,
    p: &DensityParams,
    schedule: &CoolingSchedule,
    t: f64,
) -> Result<f64> {
    if particles.is_empty() {
        return Err(Error::Estimation("empty particle set".into()));
    }
    let us = potentials::values(pot, particles);
    let ones = vec![1.0; us.len()];
    Ok(c_derivative_weighted(&us, &ones, p, schedule.beta_prime(t)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CPrediction {
    pub c: f64,
    /// The raw prediction was negative and has been floored at zero.
    pub clamped: bool,
}

/// `C + h C'`, floored at zero with a warning.
pub fn predict_c(c: f64, cprime: f64, h: f64) -> Result<CPrediction> {
    if !(h >= 0.0) {
        return Err(Error::Domain(format!("prediction horizon must be >= 0, got {h}")));
    }
    let raw = c + h * cprime;
    if raw < 0.0 {
        log::warn!("predicted normalization constant {raw} < 0, clamping to 0");
        Ok(CPrediction { c: 0.0, clamped: true })
    } else {
        Ok(CPrediction { c: raw, clamped: false })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{DoubleWell, SixHumpCamel};
    use crate::scalar_math::lambert_w0_exp;

    fn solver() -> CSolver {
        CSolver { tol: 1e-12, max_expansions: 60 }
    }

    #[test]
    fn single_particle_root_is_its_potential() {
        let p = DensityParams::new(2.0, 3.0, 0.0);
        let s = estimate_c_empirical(&Points::from_scalars(&[5.0]), &DoubleWell, &p, 0.0, &solver()).unwrap();
        assert!((s.c - 1.0).abs() < 1e-10, "U(5) = 1, got {}", s.c);
        assert_eq!(s.method, CMethod::Empirical);
        assert!(s.residual.abs() <= 1e-12);

        let s = estimate_c_empirical(&Points::from_scalars(&[4.0, 4.0]), &DoubleWell, &p, 0.0, &solver()).unwrap();
        assert!(s.c.abs() < 1e-10);
    }

    #[test]
    fn three_particle_root_matches_grid_scan() {
        let us = [0.3, 1.7, 4.2];
        let p = DensityParams::new(2.0, 1.5, 0.0);
        let (c, _) = estimate_c_from_values(&us, &p, &solver(), None).unwrap();
        // dense scan of the defect for its sign change
        let mut best = f64::NAN;
        let mut prev = mean_defect(&us, &p, 0.0);
        let step = 1e-6;
        let mut x = 0.0;
        while x < 5.0 {
            let next = mean_defect(&us, &p, x + step);
            if prev <= 0.0 && next >= 0.0 {
                best = x + step * (-prev / (next - prev));
                break;
            }
            prev = next;
            x += step;
        }
        assert!((c - best).abs() < 1e-6, "{c} vs scan {best}");
    }

    #[test]
    fn hint_gives_the_same_root() {
        let us = [0.3, 1.7, 4.2, 0.9, 2.2];
        let p = DensityParams::new(3.0, 2.0, 0.0);
        let (cold, _) = estimate_c_from_values(&us, &p, &solver(), None).unwrap();
        let (warm, _) = estimate_c_from_values(&us, &p, &solver(), Some(cold + 0.01)).unwrap();
        assert!((cold - warm).abs() < 1e-9);
    }

    #[test]
    fn defect_brackets_root() {
        let us = [0.0, 2.5, 7.0, 11.0];
        for m in [1.5, 2.0, 6.0] {
            let p = DensityParams::new(m, 4.0, 0.0);
            assert!(mean_defect(&us, &p, 0.0) <= 0.0);
            assert!(mean_defect(&us, &p, 12.0) > 0.0);
        }
    }

    #[test]
    fn empty_sample_is_an_error() {
        let p = DensityParams::new(2.0, 1.0, 0.0);
        assert!(estimate_c_from_values(&[], &p, &solver(), None).is_err());
    }

    #[test]
    fn constant_potential_gives_uniform_density() {
        struct Flat;
        impl Potential for Flat {
            fn dim(&self) -> usize {
                1
            }
            fn value(&self, _: &[f64]) -> f64 {
                0.0
            }
            fn grad(&self, _: &[f64], out: &mut [f64]) {
                out[0] = 0.0;
            }
            fn global_minima(&self) -> Vec<crate::potentials::GlobalMinimum> {
                vec![]
            }
            fn domain_box(&self) -> DomainBox {
                DomainBox { lo: vec![0.0], hi: vec![4.0] }
            }
            fn name(&self) -> &str {
                "flat"
            }
        }
        let (m, beta) = (2.0, 1.5);
        let p = DensityParams::new(m, beta, 0.0);
        let grid = TensorGrid::over_box(&Flat.domain_box(), &[101]).unwrap();
        let s = fit_c_quadrature(&Flat, &p, &grid, 0.0, &solver()).unwrap();
        let v: f64 = 4.0;
        let w = lambert_w0_exp(m.ln() + m + (m - 1.0) * beta * s.c).unwrap();
        assert!(((w / m).powf(1.0 / (m - 1.0)) - 1.0 / v).abs() < 1e-12);
        // closed form: w/m = 1/V  =>  C = (ln w + w - ln m - m) / ((m-1) beta)
        let w_star = m / v;
        let c_closed = (w_star.ln() + w_star - m.ln() - m) / ((m - 1.0) * beta);
        assert!((s.c - c_closed).abs() < 1e-10);
        assert!(s.c < 0.0);
    }

    #[test]
    fn quadrature_c_is_grid_stable() {
        let p = DensityParams::new(2.0, 4.0, 0.0);
        let dom = DoubleWell.domain_box();
        let coarse = fit_c_quadrature(&DoubleWell, &p, &TensorGrid::over_box(&dom, &[10_000]).unwrap(), 0.0, &solver()).unwrap();
        let fine = fit_c_quadrature(&DoubleWell, &p, &TensorGrid::over_box(&dom, &[100_000]).unwrap(), 0.0, &solver()).unwrap();
        assert!((coarse.c - fine.c).abs() < 1e-4, "{} vs {}", coarse.c, fine.c);
        assert!(fine.residual.abs() < 1e-10);
    }

    #[test]
    fn camel_quadrature_integrates_to_one_on_refined_grid() {
        let p = DensityParams::new(2.0, 2.0, 0.0);
        let dom = SixHumpCamel.domain_box();
        let s = fit_c_quadrature(&SixHumpCamel, &p, &TensorGrid::over_box(&dom, &[300, 200]).unwrap(), 0.0, &solver()).unwrap();
        let fine = TensorGrid::over_box(&dom, &[600, 400]).unwrap();
        let pc = p.with_c(s.c);
        let mass = fine.integrate(|x| density::rho(&pc, SixHumpCamel.value(x)));
        assert!((mass - 1.0).abs() < 1e-4, "mass {mass}");
    }

    #[test]
    fn uniform_grid_sample_matches_quadrature() {
        let p = DensityParams::new(2.0, 1.0, 0.0);
        let dom = DoubleWell.domain_box();
        let oracle = fit_c_quadrature(&DoubleWell, &p, &TensorGrid::over_box(&dom, &[100_000]).unwrap(), 0.0, &solver()).unwrap();
        let n = 1000;
        let xs: Vec<f64> = (0..n).map(|i| -8.0 + 16.0 * (i as f64 + 0.5) / n as f64).collect();
        let us: Vec<f64> = xs.iter().map(|&x| crate::potentials::double_well_1d(x)).collect();
        let cell = vec![16.0 / n as f64; n];
        let (c, _) = estimate_c_weighted(&us, &cell, &p, &solver()).unwrap();
        assert!((c - oracle.c).abs() < 2e-2, "{c} vs {}", oracle.c);
    }

    #[test]
    fn c_decays_towards_min_u_as_beta_grows() {
        let dom = DoubleWell.domain_box();
        let gv = GridValues::new(&DoubleWell, &TensorGrid::over_box(&dom, &[200_001]).unwrap());
        let cs: Vec<f64> = [1.0, 10.0, 100.0, 1000.0]
            .iter()
            .map(|&b| gv.fit_c(&DensityParams::new(2.0, b, 0.0), &solver()).unwrap().0)
            .collect();
        assert!(cs[3] <= 0.1 && cs[2] <= 0.1, "{cs:?}");
        assert!(cs[3] < cs[2], "{cs:?}");
    }

    #[test]
    fn derivative_edge_cases() {
        let p = DensityParams::new(2.0, 2.0, 1.0);
        let pts = Points::from_scalars(&[5.0, 3.0, 4.5]);
        let d = coarse_c_derivative(&pts, &DoubleWell, &p, &CoolingSchedule::constant(2.0), 0.3).unwrap();
        assert_eq!(d, 0.0);
        // every U equals C
        let pts = Points::from_scalars(&[5.0, 3.0]);
        let d = coarse_c_derivative(&pts, &DoubleWell, &p, &CoolingSchedule::quadratic(0.25, 25.0), 0.3).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn prediction() {
        assert_eq!(predict_c(1.0, 0.0, 0.04).unwrap(), CPrediction { c: 1.0, clamped: false });
        assert!((predict_c(1.0, 2.5, 0.04).unwrap().c - 1.1).abs() < 1e-15);
        let p = predict_c(0.0, -1.0, 0.04).unwrap();
        assert_eq!(p, CPrediction { c: 0.0, clamped: true });
        assert!(predict_c(1.0, 1.0, -0.1).is_err());
    }

    #[test]
    fn grids_reject_unsupported_shapes() {
        let b3 = DomainBox { lo: vec![0.0; 3], hi: vec![1.0; 3] };
        assert!(TensorGrid::over_box(&b3, &[3, 3, 3]).is_err());
        let g = TensorGrid::over_box(&SixHumpCamel.domain_box(), &[7, 5]).unwrap();
        assert!((g.weights.iter().sum::<f64>() - 24.0).abs() < 1e-12);
    }
}
