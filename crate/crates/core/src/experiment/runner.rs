//! Running an experiment: ensembles, CSV files and the run manifest.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::time::Instant;

use crate::dynamics::TrajectoryParams;
use crate::error::{Error, Result};
use crate::graph::EnsembleSpec;
use crate::moments::simulate_ensemble;
use crate::observables::{series, standard_errors, Observable, ObservableSeries};

use super::config::ExperimentConfig;

/// Header shared by every output CSV.
pub const CSV_HEADER: &str = "k,t,fbar,fbar_se,s1,s1_se,c12,c12_se,c13,c13_se,c34,c34_se,s12,s12_se";

/// Environment variable holding the worker-thread count.
pub const WORKERS_ENV: &str = "SPINNET_WORKERS";

/// Name of the manifest written next to the CSV files.
pub const MANIFEST_NAME: &str = "manifest.txt";

/// Files produced by [`run_experiment`].
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub csv_paths: Vec<PathBuf>,
    pub manifest_path: PathBuf,
    pub wall_time_s: f64,
}

/// Seed for bootstrap resampling, kept apart from the trajectory streams.
pub fn bootstrap_seed(master_seed: u64) -> u64 {
    master_seed ^ 0x5DEE_CE66_D1CE_B007
}

/// Simulates one ensemble and evaluates every observable at every step,
/// with bootstrap errors if the config asks for them.
pub fn compute_series(cfg: &ExperimentConfig, spec: &EnsembleSpec) -> Result<ObservableSeries> {
    let mut params = TrajectoryParams::new(cfg.dt, cfg.n_steps);
    params.coupling_scale = cfg.coupling_scale;
    let acc = simulate_ensemble(
        spec,
        &params,
        cfg.master_seed,
        0,
        cfg.n_realizations,
        cfg.bootstrap.is_some(),
    )?;
    let s = series(&acc, cfg.dt)?;
    match cfg.bootstrap {
        Some(b) => s.with_errors(standard_errors(&acc, b, bootstrap_seed(cfg.master_seed))?),
        None => Ok(s),
    }
}

fn cell(out: &mut String, value: Option<f64>) {
    out.push(',');
    if let Some(v) = value {
        let _ = write!(out, "{v}");
    }
}

/// Renders a series as CSV. Columns of unselected observables stay empty, as
/// do the error columns when no bootstrap was run.
pub fn csv_string(s: &ObservableSeries, selected: &[Observable]) -> String {
    let mut out = String::with_capacity(64 * (s.points.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in &s.points {
        let _ = write!(out, "{},{}", p.k, p.t);
        for obs in Observable::ALL {
            let on = selected.contains(&obs);
            cell(&mut out, p.get(obs).filter(|_| on));
            cell(&mut out, p.error(obs).filter(|_| on));
        }
        out.push('\n');
    }
    out
}

pub fn write_csv<W: Write>(w: &mut W, s: &ObservableSeries, selected: &[Observable]) -> io::Result<()> {
    w.write_all(csv_string(s, selected).as_bytes())
}

/// Reads the worker count from [`WORKERS_ENV`], if set.
pub fn workers_from_env() -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Error::Config(format!("{WORKERS_ENV}: `{v}` is not a positive integer"))),
        },
        Err(_) => Ok(None),
    }
}

/// Runs `f` on a dedicated pool of `workers` threads, or on the global pool.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("cannot start {n} workers: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Runs every point of `cfg`, writing `<label>.csv` per point and a manifest
/// into `cfg.out`. Worker count comes from [`WORKERS_ENV`].
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    run_experiment_with_workers(cfg, workers_from_env()?)
}

pub fn run_experiment_with_workers(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<RunOutput> {
    cfg.validate()?;
    let start = Instant::now();
    let points = cfg.points()?;
    fs::create_dir_all(&cfg.out)?;
    let mut csv_paths = Vec::with_capacity(points.len());
    for point in &points {
        let s = with_workers(workers, || compute_series(cfg, &point.spec))??;
        let path = cfg.out.join(format!("{}.csv", point.label));
        fs::write(&path, csv_string(&s, &cfg.observables))?;
        csv_paths.push(path);
    }
    let wall_time_s = start.elapsed().as_secs_f64();

    let mut manifest = cfg.to_kv();
    let _ = writeln!(manifest, "run.version = {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(manifest, "run.wall_time_s = {wall_time_s}");
    if let Some(n) = workers {
        let _ = writeln!(manifest, "run.workers = {n}");
    }
    let names: Vec<String> = csv_paths
        .iter()
        .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .collect();
    let _ = writeln!(manifest, "run.outputs = {}", names.join(","));
    if let Some(p) = cfg.preset {
        let _ = writeln!(manifest, "run.note = {}", p.note());
    }
    let manifest_path = cfg.out.join(MANIFEST_NAME);
    fs::write(&manifest_path, manifest)?;

    Ok(RunOutput {
        csv_paths,
        manifest_path,
        wall_time_s,
    })
}

/// Process exit code for an error: 2 for bad input or guards, 3 for the
/// filesystem, 4 for numerical integrity failures.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => 3,
        Error::Integrity { .. } | Error::NoConvergence { .. } => 4,
        Error::Domain { .. }
        | Error::Shape(_)
        | Error::ResourceLimit(_)
        | Error::Unsupported(_)
        | Error::Config(_) => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::config::ConfigOverrides;

    fn small(out: PathBuf) -> ExperimentConfig {
        ConfigOverrides {
            nodes: Some(vec![4]),
            xi_list: Some(vec![0.0]),
            n_steps: Some(10),
            n_realizations: Some(5),
            out: Some(out),
            ..Default::default()
        }
        .resolve()
        .unwrap()
    }

    #[test]
    fn frozen_network_csv() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small(dir.path().to_path_buf());
        let out = run_experiment_with_workers(&cfg, Some(1)).unwrap();
        assert_eq!(out.csv_paths.len(), 1);
        let text = fs::read_to_string(&out.csv_paths[0]).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
        assert_eq!(rows.len(), 11);
        for r in &rows {
            assert_eq!(r.len(), 14);
            assert_eq!(r[2], "1");
            assert_eq!(r[3], "");
            let c12: f64 = r[6].parse().unwrap();
            assert!((c12 - 1.0).abs() <= 1e-12, "{c12}");
        }
        assert!(out.manifest_path.exists());
    }

    #[test]
    fn unselected_columns_are_empty() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small(dir.path().to_path_buf());
        cfg.observables = vec![Observable::Entropy1];
        let out = run_experiment_with_workers(&cfg, Some(1)).unwrap();
        let text = fs::read_to_string(&out.csv_paths[0]).unwrap();
        let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row[2], "");
        assert_eq!(row[4], "0");
        assert_eq!(row[6], "");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Config("x".into())), 2);
        assert_eq!(exit_code(&Error::Io(io::Error::other("x"))), 3);
        let e = Error::Integrity {
            step: 1,
            quantity: "fbar",
            value: 2.0,
            lo: 0.0,
            hi: 1.0,
        };
        assert_eq!(exit_code(&e), 4);
    }
}
