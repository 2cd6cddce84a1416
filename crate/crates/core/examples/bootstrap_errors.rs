//! Bootstrap standard errors, and how they shrink with the ensemble size.

use spinnet::moments::bootstrap_standard_errors;
use spinnet::{avg_fidelity, simulate_ensemble, EnsembleSpec, MomentSource, TrajectoryParams};

fn main() -> spinnet::Result<()> {
    let spec = EnsembleSpec::gilbert(4, 0.3)?;
    let params = TrajectoryParams::new(0.015, 10);
    for m in [100, 400, 1600] {
        let acc = simulate_ensemble(&spec, &params, 0, 0, m, true)?;
        let f10 = avg_fidelity(&acc.row(10).expect("step in range"));
        let se = bootstrap_standard_errors(&acc, 300, 1, |table| vec![avg_fidelity(&table.rows[10])])?;
        println!("M = {m:5}: F(k=10) = {f10:.6} +/- {:.2e}", se[0]);
    }
    Ok(())
}
