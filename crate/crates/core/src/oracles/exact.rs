//! Exact ensemble averages by enumerating every labeled graph.
//!
//! Graphs are drawn independently at every step, so the averaged propagator
//! moments factor into powers of one-step maps:
//!
//! ```text
//! E[𝒰(t_k)]            = Φ1^k,   Φ1 = E_G[U_G]
//! E[𝒰(t_k) ⊗ conj 𝒰(t_k)] = Φ2^k,   Φ2 = E_G[U_G ⊗ conj U_G]
//! ```
//!
//! `Φ2` acts on row-major vectorized `N × N` matrices as `X ↦ E[U X U†]`.

use nalgebra::{DMatrix, DVector, Matrix4};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::{check_coupling_scale, check_dt, generator_from_graph, spectral_exp};
use crate::error::{Error, Result};
use crate::graph::{AdjacencyMatrix, EnsembleSpec};
use crate::moments::{MomentRow, MomentTable, PAIR_WIDTH};

/// Largest number of node pairs enumerated (`N ≤ 6`).
pub const MAX_ENUMERATED_PAIRS: usize = 15;

const CHUNK: u64 = 256;

/// One-step ensemble maps `Φ1` (`N × N`) and `Φ2` (`N² × N²`).
#[derive(Clone, Debug, PartialEq)]
pub struct ExactMomentMaps {
    pub n_nodes: usize,
    pub first: DMatrix<Complex64>,
    pub second: DMatrix<Complex64>,
    /// Sum of the enumerated graph probabilities; 1 up to round-off.
    pub total_probability: f64,
}

impl ExactMomentMaps {
    /// `E[U X U†]` for an `N × N` matrix `X`.
    pub fn apply_second(&self, x: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let n = self.n_nodes;
        let v = DVector::from_iterator(n * n, x.transpose().iter().copied());
        let out = &self.second * v;
        DMatrix::from_row_slice(n, n, out.as_slice())
    }
}

fn enumeration_guard(spec: &EnsembleSpec) -> Result<()> {
    let pairs = spec.n_max();
    if pairs > MAX_ENUMERATED_PAIRS {
        return Err(Error::ResourceLimit(format!(
            "exact enumeration supports at most {MAX_ENUMERATED_PAIRS} node pairs (N <= 6), \
             got {pairs} (N = {})",
            spec.n_nodes()
        )));
    }
    Ok(())
}

/// Sums `U_G` and `U_G ⊗ conj U_G` over all `2^{n_max}` graphs with their
/// ensemble probabilities.
pub fn build_exact_maps(spec: &EnsembleSpec, dt: f64, coupling_scale: f64) -> Result<ExactMomentMaps> {
    spec.validate()?;
    check_dt(dt)?;
    check_coupling_scale(coupling_scale)?;
    enumeration_guard(spec)?;
    let n = spec.n_nodes();
    let pairs = spec.n_max();
    let probability: Vec<f64> = (0..=pairs).map(|e| spec.graph_probability(e)).collect();
    let total_graphs = 1u64 << pairs;

    type Partial = (DMatrix<Complex64>, DMatrix<Complex64>, f64);
    let chunk_sum = |chunk: u64| -> Result<Partial> {
        let mut first = DMatrix::zeros(n, n);
        let mut second = DMatrix::zeros(n * n, n * n);
        let mut total = 0.0;
        let end = ((chunk + 1) * CHUNK).min(total_graphs);
        for mask in chunk * CHUNK..end {
            let p = probability[mask.count_ones() as usize];
            total += p;
            if p == 0.0 {
                continue;
            }
            let g = AdjacencyMatrix::from_pair_mask(n, mask);
            let u = spectral_exp(generator_from_graph(&g, coupling_scale)?.matrix(), dt)?;
            first += u.scale(p);
            second += u.kronecker(&u.conjugate()).scale(p);
        }
        Ok((first, second, total))
    };
    let chunks = total_graphs.div_ceil(CHUNK);
    let partials: Vec<Partial> = (0..chunks).into_par_iter().map(chunk_sum).collect::<Result<_>>()?;

    // ordered reduction keeps the result independent of the thread count
    let mut first = DMatrix::zeros(n, n);
    let mut second = DMatrix::zeros(n * n, n * n);
    let mut total_probability = 0.0;
    for (f, s, t) in partials {
        first += f;
        second += s;
        total_probability += t;
    }
    Ok(ExactMomentMaps {
        n_nodes: n,
        first,
        second,
        total_probability,
    })
}

/// Exact moment rows for steps `0..=n_steps`.
pub fn exact_moment_series(maps: &ExactMomentMaps, n_steps: usize) -> Result<MomentTable> {
    let n = maps.n_nodes;
    if n < 2 {
        return Err(Error::Unsupported(format!(
            "pair observables need at least 2 nodes, network has {n}"
        )));
    }
    let width = n.min(PAIR_WIDTH);
    let vec_index = |a: usize, b: usize| a * n + b;

    // E[𝒰]
    let mut mean_u = DMatrix::<Complex64>::identity(n, n);
    // E[𝒰 |1⟩⟨1| 𝒰†] and E[𝒰 (|1⟩+|2⟩)(⟨1|+⟨2|) 𝒰†], vectorized
    let mut single = DVector::<Complex64>::zeros(n * n);
    single[vec_index(0, 0)] = Complex64::new(1.0, 0.0);
    let mut pair = DVector::<Complex64>::zeros(n * n);
    for b in 0..2 {
        for d in 0..2 {
            pair[vec_index(b, d)] = Complex64::new(1.0, 0.0);
        }
    }

    let mut rows = Vec::with_capacity(n_steps + 1);
    for k in 0..=n_steps {
        if k > 0 {
            mean_u = &maps.first * mean_u;
            single = &maps.second * single;
            pair = &maps.second * pair;
        }
        let mut gram = Matrix4::zeros();
        for j in 0..width {
            for l in 0..width {
                gram[(j, l)] = pair[vec_index(j, l)];
            }
        }
        rows.push(MomentRow {
            mean_u11: mean_u[(0, 0)],
            mean_u11_abs2: single[vec_index(0, 0)].re,
            mean_m_gram: gram,
        });
    }
    Ok(MomentTable { width, rows })
}

/// Exact moment row at step `k`.
pub fn exact_moments_at_step(maps: &ExactMomentMaps, k: usize) -> Result<MomentRow> {
    let mut table = exact_moment_series(maps, k)?;
    Ok(table.rows.pop().expect("k + 1 rows"))
}
