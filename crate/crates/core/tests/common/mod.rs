#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinnet::dynamics::spectral_exp;
use spinnet::{extract_record, EnsembleMoments, MomentRow, MomentSource, Propagator, TrajectoryMomentRecord};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random propagator on `n` nodes: a product of a few exponentials of
/// random real symmetric generators.
pub fn random_propagator<R: Rng>(n: usize, rng: &mut R) -> Propagator {
    let mut p = Propagator::identity(n);
    for _ in 0..rng.random_range(1..4) {
        let mut h = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let x = rng.random_range(-1.0..1.0);
                h[(i, j)] = x;
                h[(j, i)] = x;
            }
        }
        let u = spectral_exp(&h, rng.random_range(0.1..3.0)).unwrap();
        let m = &u * p.matrix();
        p = Propagator::from_matrix(m, p.step_index() + 1).unwrap();
    }
    p
}

pub fn random_record<R: Rng>(n: usize, rng: &mut R) -> TrajectoryMomentRecord {
    extract_record(&random_propagator(n, rng)).unwrap()
}

/// Mean moments of `count` random propagators: always an admissible set.
/// `count = 1` gives pure states.
pub fn random_row<R: Rng>(n: usize, count: usize, rng: &mut R) -> (MomentRow, usize) {
    let width = n.min(4);
    let mut acc = EnsembleMoments::new(1, width, false);
    for _ in 0..count {
        acc.accumulate(vec![random_record(n, rng)]).unwrap();
    }
    (acc.row(0).unwrap(), width)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
