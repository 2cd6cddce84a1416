//! At xi = 1 every step uses the complete graph, so the averages follow a
//! closed form. Compares a single trajectory against it.

use spinnet::oracles::analytic::{complete_graph_fidelity, complete_graph_u11};
use spinnet::{run_trajectory, EnsembleSpec, TrajectoryParams, TrajectorySeed};

fn main() -> spinnet::Result<()> {
    let n = 32;
    let dt = 0.015;
    let params = TrajectoryParams::new(dt, 1000);
    let records = run_trajectory(&EnsembleSpec::gilbert(n, 1.0)?, &params, TrajectorySeed::new(0, 0))?;

    let mut worst = 0.0f64;
    for r in &records {
        let t = r.step_index as f64 * dt;
        worst = worst.max((r.u11 - complete_graph_u11(n, t)).norm());
    }
    println!("max |u11 - closed form| over 1000 steps: {worst:.2e}");
    for k in (0..=1000).step_by(100) {
        let t = k as f64 * dt;
        println!("t = {t:6.2}  F = {:.6}", complete_graph_fidelity(n, t));
    }
    Ok(())
}
