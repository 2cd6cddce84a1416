//! Fidelity decay when the edge count follows a thermal distribution.

use spinnet::{series, simulate_ensemble, EnsembleSpec, Observable, TrajectoryParams};

fn main() -> spinnet::Result<()> {
    let dt = 0.015;
    let params = TrajectoryParams::new(dt, 300);
    for t in [0.2, 1.0, 5.0] {
        let acc = simulate_ensemble(&EnsembleSpec::thermal(10, t)?, &params, 1, 0, 100, false)?;
        let f = series(&acc, dt)?.column(Observable::Fidelity);
        println!("T = {t:4}: F at t=1.5 {:.5}, at t=4.5 {:.5}", f[100], f[300]);
    }
    Ok(())
}
