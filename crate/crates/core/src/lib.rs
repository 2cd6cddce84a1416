//! Information dissipation in spin networks whose XY interaction graph is
//! redrawn at random every time step.
//!
//! A qubit (or an entangled pair of qubits) starts out at nodes 1 and 2 of an
//! `N`-node network. At each step of width `Δt` a graph is drawn from a random
//! ensemble, the network evolves under the XY Hamiltonian of that graph, and
//! the information leaks out to the rest of the network. Averaging over many
//! realizations gives the decay of the Bloch-sphere averaged fidelity, the
//! growth of linear entropy, and the fate of the pair's concurrence.
//!
//! The pipeline is
//!
//! 1. [`graph`]: Gilbert and thermal random-graph samplers,
//! 2. [`dynamics`]: single-excitation propagators `𝒰(t_k) = U_k ⋯ U_1`,
//! 3. [`moments`]: the ensemble moments every observable depends on,
//! 4. [`observables`]: fidelity, entropies, reduced states and concurrence,
//! 5. [`experiment`]: configuration, parallel runs, CSV and manifests.
//!
//! [`oracles`] holds independent reference engines (full `2^N` Hilbert space,
//! exact ensemble averages by graph enumeration, Bloch-sphere quadrature) used
//! to validate the fast path.

pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod moments;
pub mod observables;
pub mod oracles;

pub use dynamics::{
    expm_step, generator_from_graph, run_trajectory, HermitianGenerator, Propagator, StepUnitary,
    TrajectoryParams, TrajectorySeed,
};
pub use error::{Error, Result};
pub use graph::{edge_count, sample_gilbert, sample_thermal, AdjacencyMatrix, EnsembleSpec};
pub use moments::{
    extract_record, simulate_ensemble, EnsembleMoments, MomentRow, MomentSource, MomentTable,
    TrajectoryMomentRecord,
};
pub use observables::{
    avg_fidelity, avg_linear_entropy_single, concurrence_closed_form, linear_entropy_pair,
    reduced_pair_state, series, standard_errors, wootters_concurrence, Observable,
    ObservableSeries, QubitPair, ReducedState4,
};
