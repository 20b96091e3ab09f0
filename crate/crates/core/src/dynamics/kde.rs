//! Gaussian kernel density estimate with a diagonal Silverman bandwidth.

use crate::Points;

/// Kernels further than this many bandwidths (in the first coordinate) are
/// skipped; their contribution is below `exp(-32)` of a kernel peak.
const CUTOFF: f64 = 8.0;

pub struct Kde<'a> {
    points: &'a Points,
    bandwidth: Vec<f64>,
    /// Indices sorted by the first coordinate, for the cutoff window.
    order: Vec<usize>,
    first: Vec<f64>,
    norm: f64,
}

/// `h_j = sigma_j (4 / ((d + 2) n))^(1 / (d + 4))`; `1.0` where the spread is zero.
pub fn silverman_bandwidth(points: &Points) -> Vec<f64> {
    let n = points.len();
    let d = points.dim();
    let factor = (4.0 / ((d as f64 + 2.0) * n as f64)).powf(1.0 / (d as f64 + 4.0));
    let mean = points.mean();
    (0..d)
        .map(|j| {
            if n < 2 {
                return 1.0;
            }
            let var = points.rows().map(|x| (x[j] - mean[j]).powi(2)).sum::<f64>() / (n - 1) as f64;
            let h = var.sqrt() * factor;
            if h > 0.0 && h.is_finite() {
                h
            } else {
                1.0
            }
        })
        .collect()
}

impl<'a> Kde<'a> {
    pub fn new(points: &'a Points) -> Self {
        assert!(!points.is_empty(), "KDE needs at least one point");
        let bandwidth = silverman_bandwidth(points);
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| points.row(a)[0].total_cmp(&points.row(b)[0]));
        let first = order.iter().map(|&i| points.row(i)[0]).collect();
        let det: f64 = bandwidth.iter().product();
        let norm = 1.0 / (points.len() as f64 * det * (2.0 * std::f64::consts::PI).powf(points.dim() as f64 / 2.0));
        Self { points, bandwidth, order, first, norm }
    }

    pub fn bandwidth(&self) -> &[f64] {
        &self.bandwidth
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        let reach = CUTOFF * self.bandwidth[0];
        let lo = self.first.partition_point(|&v| v < x[0] - reach);
        let hi = self.first.partition_point(|&v| v <= x[0] + reach);
        let mut sum = 0.0;
        for &i in &self.order[lo..hi] {
            let y = self.points.row(i);
            let q: f64 = x.iter().zip(y).zip(&self.bandwidth).map(|((a, b), h)| ((a - b) / h).powi(2)).sum();
            sum += (-0.5 * q).exp();
        }
        sum * self.norm
    }
}
