//! Aggregates over many runs: space-time heatmaps and median min-U curves.

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};

/// Equal-width bins on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bins {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Bins {
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(lo < hi) || count == 0 || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Config(format!("invalid bins [{lo}, {hi}] x {count}")));
        }
        Ok(Self { lo, hi, count })
    }

    pub fn edges(&self) -> Vec<f64> {
        let w = (self.hi - self.lo) / self.count as f64;
        (0..=self.count).map(|i| if i == self.count { self.hi } else { self.lo + w * i as f64 }).collect()
    }

    /// Bin index; values outside the range go to the edge bins.
    pub fn index(&self, x: f64) -> usize {
        let k = ((x - self.lo) / (self.hi - self.lo) * self.count as f64).floor();
        if k.is_nan() || k < 0.0 {
            0
        } else {
            (k as usize).min(self.count - 1)
        }
    }
}

/// Particle counts per `(time bin, space bin)`, summed over runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    pub t_bins: Bins,
    pub x_bins: Bins,
    /// `counts[time_bin][space_bin]`.
    pub counts: Vec<Vec<u64>>,
}

fn check_grids(trajs: &[Trajectory]) -> Result<Vec<f64>> {
    let first = trajs.first().ok_or_else(|| Error::Config("no trajectories to aggregate".into()))?;
    let times = first.times();
    for t in &trajs[1..] {
        if t.snapshots.len() != times.len() || t.times().iter().zip(&times).any(|(a, b)| (a - b).abs() > 1e-9) {
            return Err(Error::Config("trajectories have different snapshot times".into()));
        }
    }
    Ok(times)
}

/// Each time bin shows the last snapshot taken at or before its upper edge,
/// so every bin holds every particle of every run exactly once.
pub fn aggregate_heatmap(trajs: &[Trajectory], axis: usize, n_t_bins: usize, x_bins: Bins) -> Result<Heatmap> {
    let times = check_grids(trajs)?;
    let dim = trajs[0].snapshots[0].positions.dim();
    if axis >= dim {
        return Err(Error::Config(format!("axis {axis} out of range for dimension {dim}")));
    }
    let t_end = *times.last().unwrap();
    let t_bins = Bins::new(times[0], if t_end > times[0] { t_end } else { times[0] + 1.0 }, n_t_bins)?;
    let edges = t_bins.edges();
    let mut counts = vec![vec![0u64; x_bins.count]; n_t_bins];
    for (b, row) in counts.iter_mut().enumerate() {
        let upper = edges[b + 1] + 1e-9;
        let s = times.partition_point(|&t| t <= upper).saturating_sub(1);
        for traj in trajs {
            for x in traj.snapshots[s].positions.rows() {
                row[x_bins.index(x[axis])] += 1;
            }
        }
    }
    Ok(Heatmap { t_bins, x_bins, counts })
}

/// Median (mean of the two middle values for even counts).
pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty set");
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Across-run median of `min_{i < subset_size} min_{s <= t} U(X_s^i)` per
/// snapshot time. Runs already evolve a random subset of the reference
/// ensemble, so the first `subset_size` particles are used.
pub fn median_min_u_curve(trajs: &[Trajectory], subset_size: usize) -> Result<Vec<(f64, f64)>> {
    let times = check_grids(trajs)?;
    let n = trajs[0].snapshots[0].min_u.len();
    if subset_size == 0 || subset_size > n {
        return Err(Error::Config(format!("subset size {subset_size} must be in 1..={n}")));
    }
    Ok(times
        .iter()
        .enumerate()
        .map(|(s, &t)| {
            let mut per_run: Vec<f64> = trajs
                .iter()
                .map(|tr| tr.snapshots[s].min_u[..subset_size].iter().copied().fold(f64::INFINITY, f64::min))
                .collect();
            (t, median(&mut per_run))
        })
        .collect())
}

/// Fraction of final-snapshot particles with coordinate `axis` in `[lo, hi]`.
pub fn final_fraction_in(trajs: &[Trajectory], axis: usize, lo: f64, hi: f64) -> f64 {
    let (mut inside, mut total) = (0usize, 0usize);
    for tr in trajs {
        for x in tr.last().positions.rows() {
            total += 1;
            if (lo..=hi).contains(&x[axis]) {
                inside += 1;
            }
        }
    }
    inside as f64 / total.max(1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Snapshot;
    use crate::Points;

    fn traj(xs: &[&[f64]], us: &[&[f64]]) -> Trajectory {
        Trajectory {
            snapshots: xs
                .iter()
                .zip(us)
                .enumerate()
                .map(|(s, (x, u))| Snapshot {
                    t: s as f64 * 0.1,
                    positions: Points::from_scalars(x),
                    c: 0.0,
                    plan_cost: f64::NAN,
                    ess: f64::NAN,
                    min_u: u.to_vec(),
                })
                .collect(),
        }
    }

    #[test]
    fn stationary_particle_fills_one_column() {
        let tr = traj(&[&[1.5], &[1.5], &[1.5], &[1.5]], &[&[2.0], &[2.0], &[2.0], &[2.0]]);
        let h = aggregate_heatmap(&[tr], 0, 3, Bins::new(0.0, 4.0, 4).unwrap()).unwrap();
        for row in &h.counts {
            assert_eq!(row, &vec![0, 1, 0, 0]);
        }
    }

    #[test]
    fn heatmap_conserves_mass_and_clamps() {
        let z: &[f64] = &[0.0, 0.0];
        let a = traj(&[&[-100.0, 0.5], &[0.5, 100.0], &[3.9, 2.0]], &[z; 3]);
        let b = traj(&[&[1.0, 1.0], &[2.0, 2.0], &[f64::NAN, 2.0]], &[z; 3]);
        let h = aggregate_heatmap(&[a, b], 0, 5, Bins::new(0.0, 4.0, 8).unwrap()).unwrap();
        for row in &h.counts {
            assert_eq!(row.iter().sum::<u64>(), 4);
        }
        assert!(aggregate_heatmap(&[traj(&[&[0.0]], &[&[0.0]])], 1, 2, h.x_bins).is_err());
    }

    #[test]
    fn median_examples() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn flat_curve_for_constant_u() {
        let tr = traj(&[&[0.0], &[0.0], &[0.0]], &[&[1.25], &[1.25], &[1.25]]);
        let curve = median_min_u_curve(&[tr], 1).unwrap();
        assert!(curve.iter().all(|&(_, m)| m == 1.25));
        assert_eq!(curve.len(), 3);
    }

    #[test]
    fn curve_is_median_of_subset_minima() {
        let a = traj(&[&[0.0, 0.0], &[0.0, 0.0]], &[&[5.0, 1.0], &[4.0, 0.5]]);
        let b = traj(&[&[0.0, 0.0], &[0.0, 0.0]], &[&[3.0, 9.0], &[2.0, 9.0]]);
        let c = traj(&[&[0.0, 0.0], &[0.0, 0.0]], &[&[7.0, 0.0], &[6.0, 0.0]]);
        let curve = median_min_u_curve(&[a.clone(), b.clone(), c.clone()], 1).unwrap();
        assert_eq!(curve[0].1, 5.0);
        assert_eq!(curve[1].1, 4.0);
        let curve = median_min_u_curve(&[a, b, c], 2).unwrap();
        assert_eq!(curve[0].1, 1.0);
        assert!(median_min_u_curve(&[traj(&[&[0.0]], &[&[0.0]])], 2).is_err());
    }
}
