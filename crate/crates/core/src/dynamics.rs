//! Single-excitation dynamics.
//!
//! Restricted to the span of `{|j⟩}` (one spin up at node `j`), the XY
//! network Hamiltonian is `coupling_scale · A`. Each time step draws a fresh
//! graph, exponentiates its generator through the real-symmetric spectral
//! decomposition, and left-multiplies the running propagator, so that after
//! `k` steps `𝒰(t_k) = U_k ⋯ U_2 U_1`.
//!
//! A [`Propagator`] stores the operator matrix: column `i` is the image of
//! `|i⟩`, hence the amplitude carried from node `i` to node `j` is
//! `entries[(j, i)]`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{AdjacencyMatrix, EnsembleSpec};
use crate::moments::{record_from_columns, TrajectoryMomentRecord};

const EIGEN_MAX_ITERATIONS: usize = 10_000;

/// Real symmetric generator `coupling_scale · A` (units with ħ = 1).
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianGenerator {
    matrix: DMatrix<f64>,
}

impl HermitianGenerator {
    pub fn n_nodes(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

pub fn generator_from_graph(a: &AdjacencyMatrix, coupling_scale: f64) -> Result<HermitianGenerator> {
    check_coupling_scale(coupling_scale)?;
    let n = a.n_nodes();
    let matrix = DMatrix::from_fn(n, n, |i, j| coupling_scale * f64::from(a.get(i, j)));
    Ok(HermitianGenerator { matrix })
}

pub(crate) fn check_coupling_scale(coupling_scale: f64) -> Result<()> {
    if coupling_scale > 0.0 && coupling_scale.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(
            "coupling_scale",
            format!("{coupling_scale} is not a positive finite number"),
        ))
    }
}

pub(crate) fn check_dt(dt: f64) -> Result<()> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("dt", format!("{dt} is not a positive finite number")))
    }
}

/// `exp(-i h dt)` for real symmetric `h`, as `V diag(e^{-iλdt}) Vᵀ`.
pub fn spectral_exp(h: &DMatrix<f64>, dt: f64) -> Result<DMatrix<Complex64>> {
    let n = h.nrows();
    if h.ncols() != n {
        return Err(Error::Shape(format!("generator is {}x{}", n, h.ncols())));
    }
    if h.iter().all(|&x| x == 0.0) {
        return Ok(DMatrix::identity(n, n));
    }
    let eigen = eigen(h)?;
    let v = &eigen.eigenvectors;
    let mut v_cos = v.clone();
    let mut v_sin = v.clone();
    for (a, &lambda) in eigen.eigenvalues.iter().enumerate() {
        let (s, c) = (lambda * dt).sin_cos();
        v_cos.column_mut(a).scale_mut(c);
        v_sin.column_mut(a).scale_mut(-s);
    }
    let vt = v.transpose();
    let re = v_cos * &vt;
    let im = v_sin * &vt;
    Ok(DMatrix::from_fn(n, n, |i, j| Complex64::new(re[(i, j)], im[(i, j)])))
}

const EIGEN_RETRY_SHIFTS: [f64; 3] = [1.0, 2.5, 7.0];

fn finite(e: &SymmetricEigen<f64, nalgebra::Dyn>) -> bool {
    e.eigenvalues.iter().chain(e.eigenvectors.iter()).all(|x| x.is_finite())
}

// The QR iteration occasionally returns NaN for sparse forests without
// reporting failure. A diagonal shift keeps the eigenvectors and avoids it.
fn eigen(h: &DMatrix<f64>) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    if let Some(e) = SymmetricEigen::try_new(h.clone(), f64::EPSILON, EIGEN_MAX_ITERATIONS) {
        if finite(&e) {
            return Ok(e);
        }
    }
    let scale = h.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let n = h.nrows();
    for shift in EIGEN_RETRY_SHIFTS.map(|s| s * scale) {
        let shifted = h + DMatrix::identity(n, n) * shift;
        if let Some(mut e) = SymmetricEigen::try_new(shifted, f64::EPSILON, EIGEN_MAX_ITERATIONS) {
            if finite(&e) {
                e.eigenvalues.add_scalar_mut(-shift);
                return Ok(e);
            }
        }
    }
    Err(Error::NoConvergence {
        matrix: Box::new(h.clone()),
        iterations: EIGEN_MAX_ITERATIONS,
    })
}

/// Applies `exp(-i h dt)` in place to the columns `re + i·im`, without
/// forming the exponential.
pub(crate) fn spectral_apply(h: &DMatrix<f64>, dt: f64, re: &mut DMatrix<f64>, im: &mut DMatrix<f64>) -> Result<()> {
    if h.iter().all(|&x| x == 0.0) {
        return Ok(());
    }
    let eigen = eigen(h)?;
    let v = &eigen.eigenvectors;
    let mut alpha = v.tr_mul(re);
    let mut beta = v.tr_mul(im);
    for (a, &lambda) in eigen.eigenvalues.iter().enumerate() {
        let (s, c) = (lambda * dt).sin_cos();
        for col in 0..alpha.ncols() {
            let (x, y) = (alpha[(a, col)], beta[(a, col)]);
            alpha[(a, col)] = c * x + s * y;
            beta[(a, col)] = c * y - s * x;
        }
    }
    v.mul_to(&alpha, re);
    v.mul_to(&beta, im);
    Ok(())
}

/// One step's evolution operator `exp(-i H Δt)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepUnitary {
    matrix: DMatrix<Complex64>,
}

impl StepUnitary {
    pub fn identity(n_nodes: usize) -> Self {
        StepUnitary {
            matrix: DMatrix::identity(n_nodes, n_nodes),
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }
}

pub fn expm_step(h: &HermitianGenerator, dt: f64) -> Result<StepUnitary> {
    check_dt(dt)?;
    Ok(StepUnitary {
        matrix: spectral_exp(&h.matrix, dt)?,
    })
}

/// Composed evolution `𝒰(t_k)` after `step_index` steps.
#[derive(Clone, Debug, PartialEq)]
pub struct Propagator {
    matrix: DMatrix<Complex64>,
    step_index: usize,
}

impl Propagator {
    /// `𝒰(t_0) = I`.
    pub fn identity(n_nodes: usize) -> Self {
        Propagator {
            matrix: DMatrix::identity(n_nodes, n_nodes),
            step_index: 0,
        }
    }

    /// Wraps an arbitrary matrix; no unitarity check is made.
    pub fn from_matrix(matrix: DMatrix<Complex64>, step_index: usize) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Shape(format!(
                "propagator must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Propagator { matrix, step_index })
    }

    pub fn n_nodes(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// `u_{from,to}`: amplitude on node `to` when starting from node `from` (0-based).
    #[inline]
    pub fn amplitude(&self, from: usize, to: usize) -> Complex64 {
        self.matrix[(to, from)]
    }

    /// Applies the next step: returns `u · self` with the step index advanced.
    pub fn compose(&self, u: &StepUnitary) -> Result<Propagator> {
        if u.n_nodes() != self.n_nodes() {
            return Err(Error::Shape(format!(
                "step unitary on {} nodes cannot follow propagator on {}",
                u.n_nodes(),
                self.n_nodes()
            )));
        }
        Ok(Propagator {
            matrix: &u.matrix * &self.matrix,
            step_index: self.step_index + 1,
        })
    }
}

/// Largest entrywise deviation of `m† m` from the identity.
pub fn unitarity_defect(m: &DMatrix<Complex64>) -> f64 {
    let gram = m.adjoint() * m;
    let n = gram.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - target).norm());
        }
    }
    worst
}

/// Identifies one trajectory inside an ensemble.
///
/// The generator is ChaCha8 keyed by the master seed with the trajectory index
/// as its stream number, so trajectory `i` sees the same random numbers no
/// matter which worker runs it or in which order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TrajectorySeed {
    pub master: u64,
    pub index: u64,
}

impl TrajectorySeed {
    pub fn new(master: u64, index: u64) -> Self {
        TrajectorySeed { master, index }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(self.index);
        rng
    }
}

/// Knobs shared by every trajectory of an ensemble run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryParams {
    pub dt: f64,
    pub n_steps: usize,
    pub coupling_scale: f64,
}

impl TrajectoryParams {
    pub fn new(dt: f64, n_steps: usize) -> Self {
        TrajectoryParams {
            dt,
            n_steps,
            coupling_scale: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_dt(self.dt)?;
        check_coupling_scale(self.coupling_scale)
    }
}

/// One realization: a fresh graph per step, composed into `𝒰(t_k)`, with the
/// moment record of every `k ∈ 0..=n_steps` (step 0 is the identity).
pub fn run_trajectory(
    spec: &EnsembleSpec,
    params: &TrajectoryParams,
    seed: TrajectorySeed,
) -> Result<Vec<TrajectoryMomentRecord>> {
    let sampler = spec.sampler()?;
    run_trajectory_with(&sampler, params, seed)
}

pub(crate) fn run_trajectory_with(
    sampler: &crate::graph::GraphSampler,
    params: &TrajectoryParams,
    seed: TrajectorySeed,
) -> Result<Vec<TrajectoryMomentRecord>> {
    params.validate()?;
    let n = sampler.spec().n_nodes();
    let mut rng = seed.rng();
    // only the images of |1⟩ and |2⟩ enter the moments
    let mut re = DMatrix::<f64>::identity(n, 2.min(n));
    let mut im = DMatrix::<f64>::zeros(n, 2.min(n));
    let mut records = Vec::with_capacity(params.n_steps + 1);
    records.push(record_from_columns(0, &re, &im)?);
    for k in 1..=params.n_steps {
        let graph = sampler.sample(&mut rng)?;
        let h = generator_from_graph(&graph, params.coupling_scale)?;
        spectral_apply(h.matrix(), params.dt, &mut re, &mut im)?;
        records.push(record_from_columns(k, &re, &im)?);
    }
    Ok(records)
}
