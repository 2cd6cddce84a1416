//! Command-line front end: runs an experiment (or the oracle check) and
//! writes CSV files plus a manifest.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use spinnet::experiment::config::{parse_bootstrap, parse_observables};
use spinnet::experiment::{exit_code, oracle_check, run_experiment, ConfigOverrides, EnsembleKind, Preset};
use spinnet::{Error, Observable};

#[derive(Parser, Debug)]
#[command(name = "spinnet", version, about = "Information dissipation in randomly rewired spin networks")]
struct Cli {
    /// Network sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    nodes: Option<Vec<usize>>,
    /// Gilbert edge probabilities, comma separated.
    #[arg(long, value_delimiter = ',')]
    xi: Option<Vec<f64>>,
    /// Thermal-ensemble temperatures, comma separated.
    #[arg(long, value_delimiter = ',')]
    temperature: Option<Vec<f64>>,
    /// gilbert or thermal.
    #[arg(long)]
    ensemble: Option<String>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    coupling_scale: Option<f64>,
    /// Subset of fidelity,entropy1,conc12,conc13,conc34,entropy12.
    #[arg(long)]
    observables: Option<String>,
    /// Bootstrap resample count, or `off`.
    #[arg(long)]
    bootstrap: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// fig1 .. fig5.
    #[arg(long)]
    preset: Option<String>,
    /// Key-value config file (a previous run's manifest works too).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Compare the Monte Carlo path with the exact oracles instead of writing CSV.
    #[arg(long)]
    oracle_check: bool,
}

impl Cli {
    fn overrides(&self) -> spinnet::Result<ConfigOverrides> {
        Ok(ConfigOverrides {
            nodes: self.nodes.clone(),
            ensemble: self.ensemble.as_deref().map(EnsembleKind::parse).transpose()?,
            xi_list: self.xi.clone(),
            temperature_list: self.temperature.clone(),
            dt: self.dt,
            n_steps: self.steps,
            n_realizations: self.realizations,
            master_seed: self.seed,
            coupling_scale: self.coupling_scale,
            observables: self.observables.as_deref().map(parse_observables).transpose()?,
            bootstrap: self.bootstrap.as_deref().map(parse_bootstrap).transpose()?,
            out: self.out.clone(),
            preset: self.preset.as_deref().map(Preset::parse).transpose()?,
        })
    }
}

fn run(cli: &Cli) -> spinnet::Result<bool> {
    let mut overrides = cli.overrides()?;
    if let Some(path) = &cli.config {
        let file = ConfigOverrides::from_file(path).map_err(|e| match e {
            Error::Io(io) => Error::Config(format!("config: cannot read {}: {io}", path.display())),
            other => other,
        })?;
        overrides = overrides.or(file);
    }
    if cli.oracle_check && overrides.observables.is_none() {
        // the check compares its own fixed set; keep small networks valid
        overrides.observables = Some(vec![Observable::Fidelity, Observable::Entropy1, Observable::Conc12]);
    }
    let cfg = overrides.resolve()?;
    if cli.oracle_check {
        let workers = spinnet::experiment::runner::workers_from_env()?;
        let report = spinnet::experiment::runner::with_workers(workers, || oracle_check(&cfg))??;
        print!("{report}");
        return Ok(report.passed());
    }
    let out = run_experiment(&cfg)?;
    for p in &out.csv_paths {
        println!("wrote {}", p.display());
    }
    println!("wrote {} ({:.2} s)", out.manifest_path.display(), out.wall_time_s);
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(4),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
