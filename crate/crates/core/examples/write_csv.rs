//! Full experiment run writing CSV files and a manifest into a directory
//! (default `out/example`).

use std::path::PathBuf;

use spinnet::experiment::{run_experiment, ConfigOverrides};

fn main() -> spinnet::Result<()> {
    let out = std::env::args().nth(1).map_or_else(|| PathBuf::from("out/example"), PathBuf::from);
    let cfg = ConfigOverrides {
        nodes: Some(vec![8]),
        xi_list: Some(vec![0.1, 0.5]),
        n_steps: Some(200),
        n_realizations: Some(50),
        bootstrap: Some(Some(50)),
        out: Some(out),
        ..Default::default()
    }
    .resolve()?;
    let run = run_experiment(&cfg)?;
    for p in &run.csv_paths {
        println!("{}", p.display());
    }
    println!("{}", run.manifest_path.display());
    println!("{}", std::fs::read_to_string(&run.manifest_path)?);
    Ok(())
}
