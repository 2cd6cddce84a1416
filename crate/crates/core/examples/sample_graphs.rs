//! Draws graphs from both ensembles and prints their edge statistics.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spinnet::graph::{n_max, ThermalEdgeCounts};
use spinnet::{sample_gilbert, sample_thermal, EnsembleSpec};

fn main() -> spinnet::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 8;

    let g = sample_gilbert(n, 0.3, &mut rng)?;
    println!("one Gilbert graph on {n} nodes, xi = 0.3:");
    for (i, j) in g.edges() {
        print!(" {}-{}", i + 1, j + 1);
    }
    println!();

    for xi in [0.1, 0.5, 0.9] {
        let draws = 2000;
        let total: usize = (0..draws)
            .map(|_| sample_gilbert(n, xi, &mut rng).map(|g| g.edge_count()))
            .sum::<spinnet::Result<usize>>()?;
        println!(
            "gilbert xi={xi}: mean edges {:.2} (expected {:.2})",
            total as f64 / draws as f64,
            xi * n_max(n) as f64
        );
    }

    for t in [0.5, 2.0, 10.0] {
        let table = ThermalEdgeCounts::new(n_max(n), t);
        let expected: f64 = table.pmf().iter().enumerate().map(|(k, p)| k as f64 * p).sum();
        let draws = 2000;
        let total: usize = (0..draws)
            .map(|_| sample_thermal(n, t, &mut rng).map(|g| g.edge_count()))
            .sum::<spinnet::Result<usize>>()?;
        println!(
            "thermal T={t}: mean edges {:.2} (expected {expected:.2})",
            total as f64 / draws as f64
        );
    }

    let spec = EnsembleSpec::thermal(3, 1.0)?;
    println!("thermal N=3 T=1 probability of one fixed 1-edge graph: {:.4}", spec.graph_probability(1));
    Ok(())
}
