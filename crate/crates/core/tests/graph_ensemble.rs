mod common;

use common::rng;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spinnet::graph::{n_max, pair_from_index, ThermalEdgeCounts};
use spinnet::{sample_gilbert, sample_thermal, EnsembleSpec};
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, Discrete};

/// Pearson statistic after merging neighbouring bins until every expected
/// count is at least 5. Returns (statistic, degrees of freedom).
fn chi_square(observed: &[f64], expected: &[f64]) -> (f64, usize) {
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut cur = (0.0, 0.0);
    for (&o, &e) in observed.iter().zip(expected) {
        cur.0 += o;
        cur.1 += e;
        if cur.1 >= 5.0 {
            bins.push(cur);
            cur = (0.0, 0.0);
        }
    }
    if cur.1 > 0.0 || cur.0 > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += cur.0;
                last.1 += cur.1;
            }
            None => bins.push(cur),
        }
    }
    let stat = bins.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    (stat, bins.len() - 1)
}

fn critical(df: usize) -> f64 {
    ChiSquared::new(df as f64).unwrap().inverse_cdf(1.0 - 0.001)
}

proptest! {
    #[test]
    fn samples_are_symmetric_and_hollow(n in 1usize..14, xi in 0.0f64..=1.0, t in 0.01f64..50.0, seed: u64) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        for a in [sample_gilbert(n, xi, &mut r).unwrap(), sample_thermal(n, t, &mut r).unwrap()] {
            prop_assert!(a.is_valid());
            for i in 0..n {
                prop_assert_eq!(a.get(i, i), 0);
                for j in 0..n {
                    prop_assert_eq!(a.get(i, j), a.get(j, i));
                    prop_assert!(a.get(i, j) <= 1);
                }
            }
            prop_assert_eq!(a.edge_count(), a.edges().count());
        }
    }
}

#[test]
fn gilbert_edge_counts_are_binomial() {
    let mut r = rng(10);
    for (n, xi) in [(4, 0.3), (5, 0.7)] {
        let draws = 20_000;
        let m = n_max(n);
        let mut observed = vec![0.0; m + 1];
        for _ in 0..draws {
            observed[sample_gilbert(n, xi, &mut r).unwrap().edge_count()] += 1.0;
        }
        let b = Binomial::new(xi, m as u64).unwrap();
        let expected: Vec<f64> = (0..=m).map(|k| draws as f64 * b.pmf(k as u64)).collect();
        let (stat, df) = chi_square(&observed, &expected);
        assert!(stat < critical(df), "N={n} xi={xi}: chi2 {stat} on {df} df");
    }
}

#[test]
fn gilbert_pair_marginals() {
    let mut r = rng(11);
    let (n, xi, draws) = (6, 0.35, 20_000);
    let mut hits = vec![0usize; n_max(n)];
    for _ in 0..draws {
        let a = sample_gilbert(n, xi, &mut r).unwrap();
        for (p, h) in hits.iter_mut().enumerate() {
            let (i, j) = pair_from_index(n, p);
            *h += usize::from(a.has_edge(i, j));
        }
    }
    let se = (xi * (1.0 - xi) / draws as f64).sqrt();
    for (p, &h) in hits.iter().enumerate() {
        let freq = h as f64 / draws as f64;
        assert!((freq - xi).abs() < 4.0 * se, "pair {:?}: {freq}", pair_from_index(n, p));
    }
}

#[test]
fn gilbert_mean_edge_count_n32() {
    let mut r = rng(12);
    let draws = 100_000;
    let total: usize = (0..draws).map(|_| sample_gilbert(32, 0.3, &mut r).unwrap().edge_count()).sum();
    let mean = total as f64 / draws as f64;
    let se = (496.0 * 0.3 * 0.7 / draws as f64).sqrt();
    assert!((mean - 148.8).abs() < 3.0 * se, "mean {mean}, se {se}");
}

#[test]
fn thermal_is_uniform_given_edge_count() {
    let mut r = rng(13);
    let (n, t, draws) = (4, 2.0, 200_000);
    let mut counts = vec![0.0; 1 << n_max(n)];
    for _ in 0..draws {
        counts[sample_thermal(n, t, &mut r).unwrap().pair_mask() as usize] += 1.0;
    }
    for edges in 0..=n_max(n) {
        let graphs: Vec<usize> = (0..counts.len()).filter(|m| m.count_ones() as usize == edges).collect();
        let observed: Vec<f64> = graphs.iter().map(|&m| counts[m]).collect();
        let total: f64 = observed.iter().sum();
        if graphs.len() < 2 || total / (graphs.len() as f64) < 5.0 {
            continue;
        }
        let expected = vec![total / graphs.len() as f64; graphs.len()];
        let (stat, df) = chi_square(&observed, &expected);
        assert!(stat < critical(df), "n={edges}: chi2 {stat} on {df} df");
    }
}

#[test]
fn thermal_high_temperature_makes_all_graphs_equally_likely() {
    let mut r = rng(14);
    let draws = 100_000;
    let mut counts = vec![0.0; 64];
    for _ in 0..draws {
        counts[sample_thermal(4, 1e6, &mut r).unwrap().pair_mask() as usize] += 1.0;
    }
    let (stat, df) = chi_square(&counts, &vec![draws as f64 / 64.0; 64]);
    assert!(stat < critical(df), "chi2 {stat} on {df} df");
}

#[test]
fn thermal_n3_empty_graph_frequency() {
    let e = (-1.0f64).exp();
    let p0 = 1.0 / (1.0 + 3.0 * e + 3.0 * e * e + e * e * e);
    let table = ThermalEdgeCounts::new(3, 1.0);
    assert!((table.pmf()[0] - p0).abs() < 1e-15);
    assert!((EnsembleSpec::thermal(3, 1.0).unwrap().graph_probability(0) - p0).abs() < 1e-15);

    let mut r = rng(15);
    let draws = 100_000;
    let empty = (0..draws).filter(|_| sample_thermal(3, 1.0, &mut r).unwrap().edge_count() == 0).count();
    let freq = empty as f64 / draws as f64;
    let se = (p0 * (1.0 - p0) / draws as f64).sqrt();
    assert!((freq - p0).abs() < 4.0 * se, "{freq} vs {p0}");
}

#[test]
fn thermal_edge_count_distribution() {
    let mut r = rng(16);
    let (n, t, draws) = (5, 0.8, 50_000);
    let table = ThermalEdgeCounts::new(n_max(n), t);
    let mut observed = vec![0.0; n_max(n) + 1];
    for _ in 0..draws {
        observed[sample_thermal(n, t, &mut r).unwrap().edge_count()] += 1.0;
    }
    let expected: Vec<f64> = table.pmf().iter().map(|p| p * draws as f64).collect();
    let (stat, df) = chi_square(&observed, &expected);
    assert!(stat < critical(df), "chi2 {stat} on {df} df");
}
