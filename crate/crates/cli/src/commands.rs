use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use swarm_anneal::dynamics::Trajectory;
use swarm_anneal::experiments::{
    self, aggregate_heatmap, draw_initial, median_min_u_curve, output, reference_ensemble, resolve_workers,
    run_many, Bins, RunOutput,
};
use swarm_anneal::{Error, Result};

use crate::args::{AggregateArgs, RunArgs, ValidateArgs};

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn write_aggregates(dir: &Path, trajs: &[Trajectory], x_range: impl Fn(usize) -> (f64, f64), t_bins: usize, x_bins: usize, subset: usize) -> Result<()> {
    let dim = trajs[0].snapshots[0].positions.dim();
    for axis in 0..dim {
        let (lo, hi) = x_range(axis);
        let h = aggregate_heatmap(trajs, axis, t_bins, Bins::new(lo, hi, x_bins)?)?;
        output::write_heatmap(create(&dir.join(format!("heatmap_x{}.csv", axis + 1)))?, &h)?;
    }
    let curve = median_min_u_curve(trajs, subset)?;
    output::write_min_u_curve(create(&dir.join("min_u.csv"))?, &curve)?;
    Ok(())
}

pub fn run(args: RunArgs) -> Result<ExitCode> {
    let cfg = args.resolve()?;
    let workers = resolve_workers(args.workers);
    let dir = cfg.output_dir.clone();
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("config.toml"), cfg.to_toml_string())?;
    log::info!("{} x {} on {workers} worker(s) into {}", cfg.n_runs, cfg.method, dir.display());

    let runs = run_many(&cfg, workers)?;
    for r in &runs {
        output::write_trajectory(create(&dir.join(format!("run_{:04}.csv", r.run)))?, r)?;
    }
    let pot = cfg.potential.build();
    output::write_diagnostics(create(&dir.join("diagnostics.csv"))?, &runs, pot.as_ref())?;
    write_summary(&dir.join("summary.csv"), &runs, pot.as_ref())?;

    let trajs: Vec<Trajectory> = runs.into_iter().map(|r| r.trajectory).collect();
    let domain = pot.domain_box();
    let t_bins = (trajs[0].snapshots.len() - 1).clamp(1, 50);
    write_aggregates(&dir, &trajs, |a| (domain.lo[a], domain.hi[a]), t_bins, 64, cfg.n_particles)?;
    let last = median_min_u_curve(&trajs, cfg.n_particles)?.last().map_or(f64::NAN, |p| p.1);
    println!("{} runs done; final median min U = {last:.6}; artifacts in {}", trajs.len(), dir.display());
    Ok(ExitCode::SUCCESS)
}

fn write_summary(path: &Path, runs: &[RunOutput], pot: &dyn swarm_anneal::potentials::Potential) -> Result<()> {
    use std::io::Write;
    let mut w = create(path)?;
    writeln!(w, "run,seed,final_t,final_C,best_u,final_mean_u")?;
    for r in runs {
        let s = r.trajectory.last();
        let best = s.min_u.iter().copied().fold(f64::INFINITY, f64::min);
        let mean = s.positions.rows().map(|x| pot.value(x)).sum::<f64>() / s.positions.len() as f64;
        writeln!(w, "{},{},{},{},{},{}", r.run, r.seed, s.t, s.c, best, mean)?;
    }
    w.flush()?;
    Ok(())
}

pub fn init_sample(args: RunArgs) -> Result<ExitCode> {
    let cfg = args.resolve()?;
    let pot = cfg.potential.build();
    let e = match reference_ensemble(&cfg, pot.as_ref())? {
        Some(e) => e,
        None => draw_initial(&cfg, pot.as_ref(), cfg.n_particles, experiments::run_seed(&cfg, 0))?,
    };
    fs::create_dir_all(&cfg.output_dir)?;
    let path = cfg.output_dir.join("init.csv");
    output::write_ensemble(create(&path)?, &e.positions, e.c)?;
    println!("{} particles written to {}", e.len(), path.display());
    Ok(ExitCode::SUCCESS)
}

pub fn validate(args: ValidateArgs) -> Result<ExitCode> {
    let report = experiments::validate(&args.suite)?;
    print!("{report}");
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    println!("{} checks, {failed} failed", report.checks.len());
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn trajectory_files(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| {
                    f.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with("run_") && n.ends_with(".csv"))
                })
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    if files.is_empty() {
        return Err(Error::Config("no trajectory files found".into()));
    }
    Ok(files)
}

pub fn aggregate(args: AggregateArgs) -> Result<ExitCode> {
    let mut all = std::collections::BTreeMap::new();
    for f in trajectory_files(&args.input)? {
        let file = File::open(&f).map_err(|e| Error::Config(format!("cannot open {}: {e}", f.display())))?;
        for (run, tr) in output::read_trajectories(std::io::BufReader::new(file))? {
            if all.insert(run, tr).is_some() {
                return Err(Error::Parse(format!("run {run} appears twice")));
            }
        }
    }
    let trajs: Vec<Trajectory> = all.into_values().collect();
    let n = trajs[0].snapshots[0].positions.len();
    let dim = trajs[0].snapshots[0].positions.dim();
    if args.axis >= dim {
        return Err(Error::Config(format!("axis {} out of range for dimension {dim}", args.axis)));
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in trajs.iter().flat_map(|tr| &tr.snapshots) {
        for x in s.positions.rows() {
            lo = lo.min(x[args.axis]);
            hi = hi.max(x[args.axis]);
        }
    }
    let (lo, hi) = (args.x_lo.unwrap_or(lo), args.x_hi.unwrap_or(hi));
    let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
    fs::create_dir_all(&args.out)?;
    let subset = args.subset_size.unwrap_or(n);
    let h = aggregate_heatmap(&trajs, args.axis, args.t_bins, Bins::new(lo, hi, args.x_bins)?)?;
    output::write_heatmap(create(&args.out.join(format!("heatmap_x{}.csv", args.axis + 1)))?, &h)?;
    let curve = median_min_u_curve(&trajs, subset)?;
    output::write_min_u_curve(create(&args.out.join("min_u.csv"))?, &curve)?;
    println!("aggregated {} runs into {}", trajs.len(), args.out.display());
    Ok(ExitCode::SUCCESS)
}
