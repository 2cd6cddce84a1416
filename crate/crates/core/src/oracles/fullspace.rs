//! Brute-force evolution in the full `2^N`-dimensional Hilbert space.
//!
//! The network Hamiltonian is assembled term by term from Pauli actions on
//! computational basis states,
//!
//! ```text
//! H = s · Σ_{i<j} A_ij (X_i X_j + Y_i Y_j) / 2,
//! ```
//!
//! whose single-excitation block is `s · A`. Qubit 1 (node 0) is the most
//! significant bit of the basis index.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::dynamics::{check_coupling_scale, check_dt, spectral_exp};
use crate::error::{Error, Result};
use crate::graph::AdjacencyMatrix;

/// Largest network the full-space engine accepts.
pub const MAX_QUBITS: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct FullSpaceState {
    n_qubits: usize,
    amplitudes: DVector<Complex64>,
}

impl FullSpaceState {
    /// `|0…0⟩`.
    pub fn vacuum(n_qubits: usize) -> Result<Self> {
        guard(n_qubits)?;
        let mut amplitudes = DVector::zeros(1 << n_qubits);
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(FullSpaceState { n_qubits, amplitudes })
    }

    /// `vacuum · |0…0⟩ + Σ_j c_j |j⟩` with `|j⟩` the state with only node `j` (0-based) excited.
    pub fn single_excitation(n_qubits: usize, vacuum: Complex64, excitations: &[(usize, Complex64)]) -> Result<Self> {
        let mut state = Self::vacuum(n_qubits)?;
        state.amplitudes[0] = vacuum;
        for &(node, c) in excitations {
            if node >= n_qubits {
                return Err(Error::Shape(format!("node {node} outside a {n_qubits}-qubit network")));
            }
            state.amplitudes[excitation_index(n_qubits, node)] += c;
        }
        Ok(state)
    }

    pub fn from_amplitudes(amplitudes: DVector<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if !dim.is_power_of_two() {
            return Err(Error::Shape(format!("{dim} is not a power of two")));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        guard(n_qubits)?;
        Ok(FullSpaceState { n_qubits, amplitudes })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Amplitude of the single-excitation state `|node⟩`.
    pub fn excitation_amplitude(&self, node: usize) -> Complex64 {
        self.amplitudes[excitation_index(self.n_qubits, node)]
    }

    /// Reduced density matrix of the qubits in `keep` (0-based), the first
    /// listed qubit being the most significant factor.
    pub fn reduced_density(&self, keep: &[usize]) -> DMatrix<Complex64> {
        let n = self.n_qubits;
        let bit = |index: usize, q: usize| (index >> (n - 1 - q)) & 1;
        let dim = 1 << keep.len();
        let kept = |index: usize| keep.iter().fold(0, |acc, &q| (acc << 1) | bit(index, q));
        let env_mask = (0..n)
            .filter(|q| !keep.contains(q))
            .fold(0usize, |m, q| m | 1 << (n - 1 - q));
        let mut rho = DMatrix::zeros(dim, dim);
        for a in 0..self.amplitudes.len() {
            for b in 0..self.amplitudes.len() {
                if a & env_mask == b & env_mask {
                    rho[(kept(a), kept(b))] += self.amplitudes[a] * self.amplitudes[b].conj();
                }
            }
        }
        rho
    }
}

fn excitation_index(n_qubits: usize, node: usize) -> usize {
    1 << (n_qubits - 1 - node)
}

fn guard(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        Err(Error::ResourceLimit(format!(
            "full-space oracle handles 1..={MAX_QUBITS} qubits, got {n_qubits}"
        )))
    } else {
        Ok(())
    }
}

#[derive(Clone, Copy)]
enum Pauli {
    X,
    Y,
}

/// Image of basis state `index` under `P` acting on `qubit`: (new index, factor).
fn pauli_action(n: usize, p: Pauli, qubit: usize, index: usize) -> (usize, Complex64) {
    let mask = 1 << (n - 1 - qubit);
    let factor = match p {
        Pauli::X => Complex64::new(1.0, 0.0),
        // Y|0⟩ = i|1⟩, Y|1⟩ = -i|0⟩
        Pauli::Y if index & mask == 0 => Complex64::new(0.0, 1.0),
        Pauli::Y => Complex64::new(0.0, -1.0),
    };
    (index ^ mask, factor)
}

/// Dense `2^N × 2^N` network Hamiltonian; real because `XX + YY` is.
pub fn full_hamiltonian(a: &AdjacencyMatrix, coupling_scale: f64) -> Result<DMatrix<f64>> {
    check_coupling_scale(coupling_scale)?;
    let n = a.n_nodes();
    guard(n)?;
    let dim = 1usize << n;
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for (i, j) in a.edges() {
        for p in [Pauli::X, Pauli::Y] {
            for index in 0..dim {
                let (mid, f1) = pauli_action(n, p, j, index);
                let (out, f2) = pauli_action(n, p, i, mid);
                h[(out, index)] += f1 * f2 * (coupling_scale / 2.0);
            }
        }
    }
    debug_assert!(h.iter().all(|z| z.im == 0.0));
    Ok(h.map(|z| z.re))
}

/// Applies `exp(-i H(G_k) dt)` for each graph in turn.
pub fn fullspace_evolve(
    graphs: &[AdjacencyMatrix],
    initial: &FullSpaceState,
    dt: f64,
    coupling_scale: f64,
) -> Result<FullSpaceState> {
    check_dt(dt)?;
    let n = initial.n_qubits;
    let mut amplitudes = initial.amplitudes.clone();
    for g in graphs {
        if g.n_nodes() != n {
            return Err(Error::Shape(format!(
                "graph on {} nodes applied to {n}-qubit state",
                g.n_nodes()
            )));
        }
        let u = spectral_exp(&full_hamiltonian(g, coupling_scale)?, dt)?;
        amplitudes = u * amplitudes;
    }
    Ok(FullSpaceState { n_qubits: n, amplitudes })
}
