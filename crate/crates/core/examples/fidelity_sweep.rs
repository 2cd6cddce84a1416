//! Average fidelity decay for a few edge probabilities on a small network.

use spinnet::{series, simulate_ensemble, EnsembleSpec, Observable, TrajectoryParams};

fn main() -> spinnet::Result<()> {
    let n = 12;
    let dt = 0.015;
    let params = TrajectoryParams::new(dt, 400);
    let xis = [0.05, 0.3, 0.9];
    let mut columns = Vec::new();
    for xi in xis {
        let acc = simulate_ensemble(&EnsembleSpec::gilbert(n, xi)?, &params, 7, 0, 100, false)?;
        columns.push(series(&acc, dt)?.column(Observable::Fidelity));
    }
    println!("{:>6} {:>10} {:>10} {:>10}", "t", "xi=0.05", "xi=0.3", "xi=0.9");
    for k in (0..=400).step_by(40) {
        println!(
            "{:6.2} {:10.5} {:10.5} {:10.5}",
            k as f64 * dt,
            columns[0][k],
            columns[1][k],
            columns[2][k]
        );
    }
    Ok(())
}
