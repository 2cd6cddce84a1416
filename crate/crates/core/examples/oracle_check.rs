//! Runs the oracle comparison on a four-node network: Monte Carlo against
//! exact graph enumeration, and the single-excitation engine against the
//! full Hilbert space.

use spinnet::experiment::{oracle_check, ConfigOverrides};
use spinnet::Observable;

fn main() -> spinnet::Result<()> {
    let cfg = ConfigOverrides {
        nodes: Some(vec![4]),
        xi_list: Some(vec![0.3]),
        n_steps: Some(20),
        n_realizations: Some(4000),
        bootstrap: Some(Some(100)),
        observables: Some(vec![Observable::Fidelity]),
        ..Default::default()
    }
    .resolve()?;
    let report = oracle_check(&cfg)?;
    print!("{report}");
    println!("{}", if report.passed() { "all checks passed" } else { "some checks failed" });
    Ok(())
}
