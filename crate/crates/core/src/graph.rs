//! Random interaction graphs.
//!
//! Two ensembles are supported:
//!
//! * **Gilbert** `G(N, ξ)`: every unordered pair of distinct nodes is joined
//!   independently with probability `ξ`, so the edge count is
//!   `Binomial(n_max, ξ)` with `n_max = N(N-1)/2`.
//! * **Thermal**: every labeled graph `G` carries the Boltzmann weight
//!   `exp(-n(G)/T)`, where `n(G)` is its edge count. Sampling first draws the
//!   edge count from `C(n_max, n) exp(-n/T)` by inverse CDF and then picks one
//!   of the `C(n_max, n)` configurations uniformly.
//!
//! Nodes are indexed from 0 in code; node 0 is the qubit usually called
//! "qubit 1".

use rand::Rng;

use crate::error::{Error, Result};

/// Number of unordered node pairs, i.e. the largest possible edge count.
pub fn n_max(n_nodes: usize) -> usize {
    n_nodes * n_nodes.saturating_sub(1) / 2
}

/// Maps a pair index in `0..n_max` to the pair `(i, j)` with `i < j`,
/// enumerating the strict upper triangle row by row.
pub fn pair_from_index(n_nodes: usize, mut index: usize) -> (usize, usize) {
    debug_assert!(index < n_max(n_nodes));
    let mut i = 0;
    loop {
        let row_len = n_nodes - 1 - i;
        if index < row_len {
            return (i, i + 1 + index);
        }
        index -= row_len;
        i += 1;
    }
}

/// Symmetric, hollow 0/1 adjacency matrix of a simple undirected graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AdjacencyMatrix {
    n_nodes: usize,
    entries: Vec<u8>,
}

impl AdjacencyMatrix {
    /// The graph on `n_nodes` vertices with no edges.
    pub fn empty(n_nodes: usize) -> Self {
        AdjacencyMatrix {
            n_nodes,
            entries: vec![0; n_nodes * n_nodes],
        }
    }

    pub fn complete(n_nodes: usize) -> Self {
        let mut a = Self::empty(n_nodes);
        for i in 0..n_nodes {
            for j in (i + 1)..n_nodes {
                a.insert_edge(i, j);
            }
        }
        a
    }

    /// Builds a graph from 0-based edge pairs. Loops and out-of-range nodes are rejected;
    /// repeated pairs collapse to one edge.
    pub fn from_edges(n_nodes: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut a = Self::empty(n_nodes);
        for &(i, j) in edges {
            if i >= n_nodes || j >= n_nodes {
                return Err(Error::Shape(format!(
                    "edge ({i}, {j}) references a node outside 0..{n_nodes}"
                )));
            }
            if i == j {
                return Err(Error::domain("edges", format!("self-loop at node {i}")));
            }
            a.insert_edge(i, j);
        }
        Ok(a)
    }

    /// Builds the graph whose edge set is given by the set bits of `mask`,
    /// bit `p` standing for the pair [`pair_from_index`]`(n_nodes, p)`.
    pub fn from_pair_mask(n_nodes: usize, mask: u64) -> Self {
        let pairs = n_max(n_nodes);
        assert!(pairs <= 64, "pair mask supports at most 64 pairs");
        let mut a = Self::empty(n_nodes);
        for p in 0..pairs {
            if mask >> p & 1 == 1 {
                let (i, j) = pair_from_index(n_nodes, p);
                a.insert_edge(i, j);
            }
        }
        a
    }

    fn insert_edge(&mut self, i: usize, j: usize) {
        let n = self.n_nodes;
        self.entries[i * n + j] = 1;
        self.entries[j * n + i] = 1;
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.entries[i * self.n_nodes + j]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.get(i, j) == 1
    }

    /// Number of ones in the strict upper triangle.
    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    /// Edges as `(i, j)` with `i < j`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n_nodes;
        (0..n)
            .flat_map(move |i| ((i + 1)..n).map(move |j| (i, j)))
            .filter(move |&(i, j)| self.has_edge(i, j))
    }

    /// Bitmask over pair indices, inverse of [`AdjacencyMatrix::from_pair_mask`].
    pub fn pair_mask(&self) -> u64 {
        let pairs = n_max(self.n_nodes);
        assert!(pairs <= 64, "pair mask supports at most 64 pairs");
        (0..pairs)
            .filter(|&p| {
                let (i, j) = pair_from_index(self.n_nodes, p);
                self.has_edge(i, j)
            })
            .fold(0u64, |m, p| m | 1 << p)
    }

    /// Exact check of the hollow/symmetric/binary invariants.
    pub fn is_valid(&self) -> bool {
        let n = self.n_nodes;
        (0..n).all(|i| {
            self.get(i, i) == 0
                && (0..n).all(|j| self.get(i, j) <= 1 && self.get(i, j) == self.get(j, i))
        })
    }
}

/// Free-function form of [`AdjacencyMatrix::edge_count`].
pub fn edge_count(a: &AdjacencyMatrix) -> usize {
    a.edge_count()
}

/// Which random-graph ensemble generates the interaction graph at each step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EnsembleSpec {
    Gilbert { n_nodes: usize, xi: f64 },
    Thermal { n_nodes: usize, temperature: f64 },
}

impl EnsembleSpec {
    pub fn gilbert(n_nodes: usize, xi: f64) -> Result<Self> {
        let spec = EnsembleSpec::Gilbert { n_nodes, xi };
        spec.validate()?;
        Ok(spec)
    }

    pub fn thermal(n_nodes: usize, temperature: f64) -> Result<Self> {
        let spec = EnsembleSpec::Thermal {
            n_nodes,
            temperature,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_nodes() == 0 {
            return Err(Error::domain("n_nodes", "must be at least 1"));
        }
        match *self {
            EnsembleSpec::Gilbert { xi, .. } => check_xi(xi),
            EnsembleSpec::Thermal { temperature, .. } => check_temperature(temperature),
        }
    }

    pub fn n_nodes(&self) -> usize {
        match *self {
            EnsembleSpec::Gilbert { n_nodes, .. } | EnsembleSpec::Thermal { n_nodes, .. } => n_nodes,
        }
    }

    pub fn n_max(&self) -> usize {
        n_max(self.n_nodes())
    }

    /// Probability of one particular labeled graph with `edges` edges.
    pub fn graph_probability(&self, edges: usize) -> f64 {
        let pairs = self.n_max();
        match *self {
            EnsembleSpec::Gilbert { xi, .. } => {
                xi.powi(edges as i32) * (1.0 - xi).powi((pairs - edges) as i32)
            }
            EnsembleSpec::Thermal { temperature, .. } => {
                let counts = ThermalEdgeCounts::new(pairs, temperature);
                counts.pmf[edges] / binomial(pairs, edges)
            }
        }
    }

    /// Prepares a reusable sampler; the thermal edge-count table is built once here.
    pub fn sampler(&self) -> Result<GraphSampler> {
        self.validate()?;
        let thermal = match *self {
            EnsembleSpec::Thermal { temperature, .. } => {
                Some(ThermalEdgeCounts::new(self.n_max(), temperature))
            }
            EnsembleSpec::Gilbert { .. } => None,
        };
        Ok(GraphSampler {
            spec: *self,
            thermal,
        })
    }
}

fn check_xi(xi: f64) -> Result<()> {
    if (0.0..=1.0).contains(&xi) {
        Ok(())
    } else {
        Err(Error::domain("xi", format!("{xi} is not in [0, 1]")))
    }
}

fn check_temperature(temperature: f64) -> Result<()> {
    if temperature > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(
            "temperature",
            format!("{temperature} is not strictly positive"),
        ))
    }
}

/// Draws one Gilbert graph: each pair `i < j` independently with probability `xi`.
pub fn sample_gilbert<R: Rng + ?Sized>(n_nodes: usize, xi: f64, rng: &mut R) -> Result<AdjacencyMatrix> {
    if n_nodes == 0 {
        return Err(Error::domain("n_nodes", "must be at least 1"));
    }
    check_xi(xi)?;
    Ok(gilbert_unchecked(n_nodes, xi, rng))
}

fn gilbert_unchecked<R: Rng + ?Sized>(n_nodes: usize, xi: f64, rng: &mut R) -> AdjacencyMatrix {
    let mut a = AdjacencyMatrix::empty(n_nodes);
    for i in 0..n_nodes {
        for j in (i + 1)..n_nodes {
            // random::<f64>() lies in [0, 1): xi = 0 never fires, xi = 1 always does
            if rng.random::<f64>() < xi {
                a.insert_edge(i, j);
            }
        }
    }
    a
}

/// Draws one graph from the thermal ensemble at temperature `temperature`.
pub fn sample_thermal<R: Rng + ?Sized>(
    n_nodes: usize,
    temperature: f64,
    rng: &mut R,
) -> Result<AdjacencyMatrix> {
    EnsembleSpec::thermal(n_nodes, temperature)?.sampler()?.sample(rng)
}

/// Normalized edge-count law `p(n) ∝ C(n_max, n) exp(-n/T)` with its CDF.
#[derive(Clone, Debug)]
pub struct ThermalEdgeCounts {
    pmf: Vec<f64>,
    cdf: Vec<f64>,
}

impl ThermalEdgeCounts {
    pub fn new(n_max: usize, temperature: f64) -> Self {
        // log-space weights; C(496, 248) alone is ~1e148
        let mut log_w = Vec::with_capacity(n_max + 1);
        let mut log_binom = 0.0f64;
        for n in 0..=n_max {
            if n > 0 {
                log_binom += ((n_max - n + 1) as f64).ln() - (n as f64).ln();
            }
            log_w.push(log_binom - n as f64 / temperature);
        }
        let top = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = log_w.iter().map(|&l| (l - top).exp()).collect();
        let total: f64 = w.iter().sum();
        let pmf: Vec<f64> = w.iter().map(|&x| x / total).collect();
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = pmf
            .iter()
            .map(|&p| {
                acc += p;
                acc
            })
            .collect();
        *cdf.last_mut().expect("n_max + 1 >= 1 entries") = 1.0;
        ThermalEdgeCounts { pmf, cdf }
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u = rng.random::<f64>();
        self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1)
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Places exactly `edges` edges on a uniformly chosen subset of the pairs
/// (partial Fisher–Yates over pair indices).
pub fn uniform_graph_with_edges<R: Rng + ?Sized>(
    n_nodes: usize,
    edges: usize,
    rng: &mut R,
) -> AdjacencyMatrix {
    let pairs = n_max(n_nodes);
    assert!(edges <= pairs, "{edges} edges requested but only {pairs} pairs");
    let mut index: Vec<usize> = (0..pairs).collect();
    let mut a = AdjacencyMatrix::empty(n_nodes);
    for slot in 0..edges {
        let pick = rng.random_range(slot..pairs);
        index.swap(slot, pick);
        let (i, j) = pair_from_index(n_nodes, index[slot]);
        a.insert_edge(i, j);
    }
    a
}

/// A validated ensemble ready for repeated draws.
#[derive(Clone, Debug)]
pub struct GraphSampler {
    spec: EnsembleSpec,
    thermal: Option<ThermalEdgeCounts>,
}

impl GraphSampler {
    pub fn spec(&self) -> &EnsembleSpec {
        &self.spec
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<AdjacencyMatrix> {
        Ok(match (&self.spec, &self.thermal) {
            (EnsembleSpec::Gilbert { n_nodes, xi }, _) => gilbert_unchecked(*n_nodes, *xi, rng),
            (EnsembleSpec::Thermal { n_nodes, .. }, Some(counts)) => {
                let edges = counts.sample(rng);
                uniform_graph_with_edges(*n_nodes, edges, rng)
            }
            (EnsembleSpec::Thermal { .. }, None) => unreachable!("thermal sampler without table"),
        })
    }
}
