//! Subspace against full-space reduced states along one graph sequence.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dynamics::{expm_step, generator_from_graph, Propagator};
use crate::error::Result;
use crate::graph::AdjacencyMatrix;
use crate::moments::{extract_record, MomentRow};
use crate::observables::{reduced_pair_state, single_qubit_state, QubitPair};
use crate::oracles::fullspace::{fullspace_evolve, FullSpaceState};

fn max_entry_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entrywise deviation between the subspace and full-space reduced
/// states after applying `graphs` in order.
///
/// Two initial states are checked: `c0|0⟩ + c1|1⟩` on qubit 1 (comparing
/// `ρ1`) and the Bell pair `(|01⟩ + |10⟩)/√2` on qubits 1, 2 (comparing
/// `ρ12`, and `ρ13`, `ρ34` when the network has four nodes or more).
pub fn subspace_fullspace_deviation(
    graphs: &[AdjacencyMatrix],
    dt: f64,
    coupling_scale: f64,
    c0: Complex64,
    c1: Complex64,
) -> Result<f64> {
    let n = graphs.first().map_or(2, AdjacencyMatrix::n_nodes);
    let mut p = Propagator::identity(n);
    for g in graphs {
        p = p.compose(&expm_step(&generator_from_graph(g, coupling_scale)?, dt)?)?;
    }
    let record = extract_record(&p)?;
    let row = MomentRow::from(&record);

    let single = FullSpaceState::single_excitation(n, c0, &[(0, c1)])?;
    let single = fullspace_evolve(graphs, &single, dt, coupling_scale)?;
    let sub = single_qubit_state(c0, c1, row.mean_u11, row.mean_u11_abs2);
    let sub = DMatrix::from_iterator(2, 2, sub.iter().copied());
    let mut worst = max_entry_diff(&sub, &single.reduced_density(&[0]));

    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let bell = FullSpaceState::single_excitation(n, Complex64::new(0.0, 0.0), &[(0, h), (1, h)])?;
    let bell = fullspace_evolve(graphs, &bell, dt, coupling_scale)?;
    for pair in QubitPair::ALL {
        let (a, b) = pair.nodes();
        if b >= n {
            continue;
        }
        let sub = reduced_pair_state(&row, record.width, pair)?.matrix;
        let sub = DMatrix::from_iterator(4, 4, sub.iter().copied());
        worst = worst.max(max_entry_diff(&sub, &bell.reduced_density(&[a, b])));
    }
    Ok(worst)
}
