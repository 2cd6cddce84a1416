//! Concurrence of the initially entangled pair and of pairs that were never
//! entangled, plus the two-qubit linear entropy.

use spinnet::{
    concurrence_closed_form, series, simulate_ensemble, EnsembleSpec, MomentSource, Observable, QubitPair,
    TrajectoryParams,
};

fn main() -> spinnet::Result<()> {
    let dt = 0.015;
    let params = TrajectoryParams::new(dt, 300);
    let acc = simulate_ensemble(&EnsembleSpec::gilbert(16, 0.1)?, &params, 3, 0, 100, false)?;
    let s = series(&acc, dt)?;
    println!("{:>6} {:>8} {:>8} {:>8} {:>8}", "t", "C12", "C13", "C34", "S12");
    for p in s.points.iter().step_by(30) {
        println!(
            "{:6.3} {:8.4} {:8.4} {:8.4} {:8.4}",
            p.t,
            p.get(Observable::Conc12).unwrap_or(f64::NAN),
            p.get(Observable::Conc13).unwrap_or(f64::NAN),
            p.get(Observable::Conc34).unwrap_or(f64::NAN),
            p.get(Observable::Entropy12).unwrap_or(f64::NAN),
        );
    }
    let peak = s.column(Observable::Conc13).into_iter().fold(0.0, f64::max);
    println!("peak C13 = {peak:.4}");

    // the Wootters value equals |E(m1 m2*)| for these states
    let row = acc.row(150).expect("step in range");
    println!(
        "closed-form C12 at step 150: {:.6}",
        concurrence_closed_form(&row, acc.width(), QubitPair::OneTwo)?
    );
    Ok(())
}
