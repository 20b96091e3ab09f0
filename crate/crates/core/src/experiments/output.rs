//! CSV artifacts. Every file has a header row.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use super::aggregate::Heatmap;
use super::runner::RunOutput;
use crate::dynamics::{Snapshot, Trajectory};
use crate::error::{Error, Result};
use crate::potentials::Potential;
use crate::Points;

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse(format!("{other:?}")),
    }
}

fn coord_headers(dim: usize) -> impl Iterator<Item = String> {
    (1..=dim).map(|j| format!("x{j}"))
}

/// One row per `(snapshot, particle)`:
/// `run,t,particle,x1..xd,C,min_u`.
pub fn write_trajectory<W: Write>(out: W, run: &RunOutput) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let dim = run.trajectory.snapshots[0].positions.dim();
    let mut header: Vec<String> = vec!["run".into(), "t".into(), "particle".into()];
    header.extend(coord_headers(dim));
    header.extend(["C".into(), "min_u".into()]);
    w.write_record(&header).map_err(csv_err)?;
    for s in &run.trajectory.snapshots {
        for (i, x) in s.positions.rows().enumerate() {
            let mut rec = vec![run.run.to_string(), s.t.to_string(), i.to_string()];
            rec.extend(x.iter().map(f64::to_string));
            rec.push(s.c.to_string());
            rec.push(s.min_u[i].to_string());
            w.write_record(&rec).map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads trajectories written by [`write_trajectory`] (one or many runs
/// per input), keyed by run index.
pub fn read_trajectories<R: Read>(input: R) -> Result<BTreeMap<usize, Trajectory>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    let dim = header.iter().filter(|h| h.starts_with('x')).count();
    let expected = 5 + dim;
    if dim == 0 || header.len() != expected || &header[0] != "run" || &header[expected - 2] != "C" {
        return Err(Error::Parse(format!("unexpected trajectory header {header:?}")));
    }
    let mut runs: BTreeMap<usize, Vec<(f64, Vec<f64>, f64, f64)>> = BTreeMap::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let num = |k: usize| -> Result<f64> {
            rec[k].trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{}` in column {k}", &rec[k])))
        };
        let run = rec[0].trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad run index `{}`", &rec[0])))?;
        let x = (0..dim).map(|j| num(3 + j)).collect::<Result<Vec<_>>>()?;
        runs.entry(run).or_default().push((num(1)?, x, num(3 + dim)?, num(4 + dim)?));
    }
    let mut out = BTreeMap::new();
    for (run, rows) in runs {
        // (t, coordinates, C, min_u) per snapshot, in file order
        let mut groups: Vec<(f64, Vec<f64>, f64, Vec<f64>)> = Vec::new();
        for (t, x, c, mu) in rows {
            match groups.last_mut() {
                Some(g) if g.0 == t => {
                    g.1.extend(x);
                    g.3.push(mu);
                }
                _ => groups.push((t, x, c, vec![mu])),
            }
        }
        let snapshots = groups
            .into_iter()
            .map(|(t, data, c, min_u)| Snapshot {
                t,
                positions: Points::new(dim, data),
                c,
                plan_cost: f64::NAN,
                ess: f64::NAN,
                min_u,
            })
            .collect();
        out.insert(run, Trajectory { snapshots });
    }
    Ok(out)
}

/// Per-snapshot diagnostics: `run,t,C,plan_cost,ess,mean_u,min_u`.
pub fn write_diagnostics<W: Write>(out: W, runs: &[RunOutput], pot: &dyn Potential) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["run", "t", "C", "plan_cost", "ess", "mean_u", "min_u"]).map_err(csv_err)?;
    for run in runs {
        for s in &run.trajectory.snapshots {
            let n = s.positions.len() as f64;
            let mean_u = s.positions.rows().map(|x| pot.value(x)).sum::<f64>() / n;
            let min_u = s.min_u.iter().copied().fold(f64::INFINITY, f64::min);
            let rec = [run.run as f64, s.t, s.c, s.plan_cost, s.ess, mean_u, min_u];
            w.write_record(rec.iter().map(|v| v.to_string())).map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Header `t_lo,t_hi` followed by one `lo:hi` label per space bin.
pub fn write_heatmap<W: Write>(out: W, h: &Heatmap) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let xe = h.x_bins.edges();
    let mut header = vec!["t_lo".to_string(), "t_hi".to_string()];
    header.extend(xe.windows(2).map(|e| format!("{}:{}", e[0], e[1])));
    w.write_record(&header).map_err(csv_err)?;
    let te = h.t_bins.edges();
    for (b, row) in h.counts.iter().enumerate() {
        let mut rec = vec![te[b].to_string(), te[b + 1].to_string()];
        rec.extend(row.iter().map(u64::to_string));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// `t,median_min_u`.
pub fn write_min_u_curve<W: Write>(out: W, curve: &[(f64, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "median_min_u"]).map_err(csv_err)?;
    for (t, m) in curve {
        w.write_record([t.to_string(), m.to_string()]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// `particle,x1..xd,C` for an initial ensemble.
pub fn write_ensemble<W: Write>(out: W, positions: &Points, c: f64) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["particle".to_string()];
    header.extend(coord_headers(positions.dim()));
    header.push("C".into());
    w.write_record(&header).map_err(csv_err)?;
    for (i, x) in positions.rows().enumerate() {
        let mut rec = vec![i.to_string()];
        rec.extend(x.iter().map(f64::to_string));
        rec.push(c.to_string());
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_run() -> RunOutput {
        let snap = |t: f64, xs: Vec<f64>, mu: Vec<f64>| Snapshot {
            t,
            positions: Points::new(2, xs),
            c: 0.125,
            plan_cost: 0.5,
            ess: 2.0,
            min_u: mu,
        };
        RunOutput {
            run: 3,
            seed: 9,
            trajectory: Trajectory {
                snapshots: vec![
                    snap(0.0, vec![1.0, 2.0, -0.5, 0.25], vec![4.0, 1.5]),
                    snap(0.01, vec![1.1, 2.0, -0.4, 0.2], vec![3.5, 1.5]),
                ],
            },
        }
    }

    #[test]
    fn trajectory_round_trip() {
        let run = sample_run();
        let mut buf = Vec::new();
        write_trajectory(&mut buf, &run).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("run,t,particle,x1,x2,C,min_u\n"));
        let back = read_trajectories(buf.as_slice()).unwrap();
        let tr = &back[&3];
        assert_eq!(tr.snapshots.len(), 2);
        for (a, b) in tr.snapshots.iter().zip(&run.trajectory.snapshots) {
            assert_eq!(a.t, b.t);
            assert_eq!(a.positions, b.positions);
            assert_eq!(a.min_u, b.min_u);
            assert_eq!(a.c, b.c);
        }
    }

    #[test]
    fn rejects_foreign_csv() {
        assert!(read_trajectories("a,b\n1,2\n".as_bytes()).is_err());
        let bad = "run,t,particle,x1,C,min_u\n0,zero,0,1,0,0\n";
        assert!(matches!(read_trajectories(bad.as_bytes()), Err(Error::Parse(_))));
    }
}
