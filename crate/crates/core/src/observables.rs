//! Observables built from ensemble moments.
//!
//! Single-qubit information (qubit 1 prepared on the Bloch sphere, the rest in
//! `|0⟩`) is summarized by the sphere-averaged fidelity and linear entropy,
//! both closed forms in `E(u11)` and `E(|u11|²)`.
//!
//! Pair information (qubits 1, 2 prepared in `(|10⟩ + |01⟩)/√2`) lives in the
//! two-qubit reduced states of pairs (1,2), (1,3) and (3,4). In the
//! single-excitation sector each is fixed by the Gram entries `E(m_j m_l*)`:
//!
//! ```text
//! ρ = p00 |00⟩⟨00| + p10 |10⟩⟨10| + p01 |01⟩⟨01| + (z |10⟩⟨01| + h.c.)
//! p10 = E|m_j|²/2   p01 = E|m_l|²/2   z = E(m_j m_l*)/2   p00 = 1 - p10 - p01
//! ```

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::moments::{bootstrap_standard_errors, EnsembleMoments, MomentRow, MomentSource};

/// Eigenvalues of `ρρ̃` down to this are treated as round-off.
pub const EIGEN_CLAMP: f64 = 1e-10;

/// Tolerance used when checking observable ranges.
pub const BOUND_TOL: f64 = 1e-9;

// two-qubit basis order
const B00: usize = 0;
const B01: usize = 1;
const B10: usize = 2;

/// Sphere-averaged fidelity `1/2 + Re E(u11)/3 + E|u11|²/6`.
pub fn avg_fidelity(row: &MomentRow) -> f64 {
    (3.0 + 2.0 * row.mean_u11.re + row.mean_u11_abs2) / 6.0
}

/// Sphere-averaged single-qubit linear entropy
/// `E|u11|² - |E u11|²/3 - 2 (E|u11|²)²/3`.
pub fn avg_linear_entropy_single(row: &MomentRow) -> f64 {
    let q = row.mean_u11_abs2;
    (3.0 * q - row.mean_u11.norm_sqr() - 2.0 * q * q) / 3.0
}

/// Reduced state of qubit 1 for the initial state `c0|0⟩ + c1|1⟩`.
///
/// Basis `{|0⟩, |1⟩}`. With `c0 = cos(θ/2)`, `c1 = e^{iφ} sin(θ/2)` this is
/// the averaged qubit-1 state the fidelity and entropy averages are taken over.
pub fn single_qubit_state(c0: Complex64, c1: Complex64, mean_u11: Complex64, mean_u11_abs2: f64) -> Matrix2<Complex64> {
    let p1 = c1.norm_sqr();
    let excited = p1 * mean_u11_abs2;
    let coherence = c0.conj() * c1 * mean_u11; // ⟨1|ρ|0⟩
    Matrix2::new(
        Complex64::new(c0.norm_sqr() + p1 - excited, 0.0),
        coherence.conj(),
        coherence,
        Complex64::new(excited, 0.0),
    )
}

/// `1 - Tr ρ²` for any square density matrix.
pub fn linear_entropy<D>(rho: &nalgebra::OMatrix<Complex64, D, D>) -> f64
where
    D: nalgebra::Dim,
    nalgebra::DefaultAllocator: nalgebra::allocator::Allocator<D, D>,
{
    // Tr ρ² = Σ |ρ_ij|² for Hermitian ρ
    1.0 - rho.iter().map(|z| z.norm_sqr()).sum::<f64>()
}

/// The qubit pairs whose reduced states are tracked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QubitPair {
    /// Qubits 1 and 2, the initially entangled pair.
    OneTwo,
    /// Qubit 1 (or 2) with a qubit outside the initial pair.
    OneThree,
    /// Two qubits outside the initial pair.
    ThreeFour,
}

impl QubitPair {
    pub const ALL: [QubitPair; 3] = [QubitPair::OneTwo, QubitPair::OneThree, QubitPair::ThreeFour];

    /// 0-based node labels `(a, b)`; the first one is the left tensor factor.
    pub fn nodes(self) -> (usize, usize) {
        match self {
            QubitPair::OneTwo => (0, 1),
            QubitPair::OneThree => (0, 2),
            QubitPair::ThreeFour => (2, 3),
        }
    }

    /// Parses labels such as `(1,2)` given 1-based.
    pub fn from_labels(a: usize, b: usize) -> Result<Self> {
        match (a, b) {
            (1, 2) => Ok(QubitPair::OneTwo),
            (1, 3) => Ok(QubitPair::OneThree),
            (3, 4) => Ok(QubitPair::ThreeFour),
            _ => Err(Error::Unsupported(format!(
                "pair ({a},{b}) is not tracked; supported pairs are (1,2), (1,3), (3,4)"
            ))),
        }
    }

    fn min_width(self) -> usize {
        self.nodes().1 + 1
    }
}

/// Two-qubit density matrix in basis `{|00⟩, |01⟩, |10⟩, |11⟩}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedState4 {
    pub pair: QubitPair,
    pub matrix: Matrix4<Complex64>,
}

/// Builds `ρ_ab` for `pair` from the Gram of `m_1..m_4`.
pub fn reduced_pair_state(row: &MomentRow, width: usize, pair: QubitPair) -> Result<ReducedState4> {
    if width < pair.min_width() {
        return Err(Error::Unsupported(format!(
            "pair {:?} needs at least {} nodes, network has {width}",
            pair,
            pair.min_width()
        )));
    }
    let (j, l) = pair.nodes();
    let g = &row.mean_m_gram;
    let p10 = g[(j, j)].re / 2.0;
    let p01 = g[(l, l)].re / 2.0;
    let z = g[(j, l)] / 2.0;
    let mut matrix = Matrix4::zeros();
    matrix[(B00, B00)] = Complex64::new(1.0 - p10 - p01, 0.0);
    matrix[(B10, B10)] = Complex64::new(p10, 0.0);
    matrix[(B01, B01)] = Complex64::new(p01, 0.0);
    matrix[(B10, B01)] = z;
    matrix[(B01, B10)] = z.conj();
    Ok(ReducedState4 { pair, matrix })
}

fn pauli_y() -> Matrix2<Complex64> {
    let i = Complex64::new(0.0, 1.0);
    let o = Complex64::new(0.0, 0.0);
    Matrix2::new(o, -i, i, o)
}

/// Wootters concurrence `max(0, √λ1 - √λ2 - √λ3 - √λ4)`, with `λ` the
/// decreasing eigenvalues of `ρ (Y⊗Y) ρ* (Y⊗Y)`.
///
/// The `√λ` are obtained directly as the singular values of `Wᵀ (Y⊗Y) W`
/// for the factor `ρ = W W†`, so no square root of a round-off sized
/// eigenvalue enters the result.
pub fn wootters_concurrence(rho: &Matrix4<Complex64>) -> Result<f64> {
    let herm = (rho + rho.adjoint()).scale(0.5);
    let eigen = herm.symmetric_eigen();
    let lowest = eigen.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if lowest < -EIGEN_CLAMP {
        return Err(Error::domain(
            "rho",
            format!("not positive semidefinite, smallest eigenvalue {lowest:e}"),
        ));
    }
    let mut w = eigen.eigenvectors;
    for (a, &lambda) in eigen.eigenvalues.iter().enumerate() {
        w.column_mut(a).scale_mut(lambda.max(0.0).sqrt());
    }
    let y = pauli_y();
    let yy: Matrix4<Complex64> = y.kronecker(&y);
    let tau = w.transpose() * yy * w;
    let mut roots: Vec<f64> = tau.singular_values().iter().copied().collect();
    roots.sort_by(|a, b| b.total_cmp(a));
    Ok((roots[0] - roots[1] - roots[2] - roots[3]).max(0.0))
}

/// `|E(m_j m_l*)|`, the concurrence of a single-excitation pair state.
pub fn concurrence_closed_form(row: &MomentRow, width: usize, pair: QubitPair) -> Result<f64> {
    if width < pair.min_width() {
        return Err(Error::Unsupported(format!(
            "pair {:?} needs at least {} nodes, network has {width}",
            pair,
            pair.min_width()
        )));
    }
    let (j, l) = pair.nodes();
    Ok(row.mean_m_gram[(j, l)].norm())
}

/// Linear entropy of qubits 1, 2 from `a = E|m1|²`, `b = E|m2|²`, `c = E(m1 m2*)`:
/// `a + b - ab/2 - a²/2 - b²/2 - |c|²/2`.
pub fn linear_entropy_pair(row: &MomentRow) -> f64 {
    let g = &row.mean_m_gram;
    let a = g[(0, 0)].re;
    let b = g[(1, 1)].re;
    let c = g[(0, 1)].norm_sqr();
    a + b - a * b / 2.0 - a * a / 2.0 - b * b / 2.0 - c / 2.0
}

/// The six tracked observables, in CSV column order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Observable {
    Fidelity,
    Entropy1,
    Conc12,
    Conc13,
    Conc34,
    Entropy12,
}

impl Observable {
    pub const ALL: [Observable; 6] = [
        Observable::Fidelity,
        Observable::Entropy1,
        Observable::Conc12,
        Observable::Conc13,
        Observable::Conc34,
        Observable::Entropy12,
    ];

    /// Name used on the command line.
    pub fn name(self) -> &'static str {
        match self {
            Observable::Fidelity => "fidelity",
            Observable::Entropy1 => "entropy1",
            Observable::Conc12 => "conc12",
            Observable::Conc13 => "conc13",
            Observable::Conc34 => "conc34",
            Observable::Entropy12 => "entropy12",
        }
    }

    /// CSV column stem.
    pub fn column(self) -> &'static str {
        match self {
            Observable::Fidelity => "fbar",
            Observable::Entropy1 => "s1",
            Observable::Conc12 => "c12",
            Observable::Conc13 => "c13",
            Observable::Conc34 => "c34",
            Observable::Entropy12 => "s12",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Observable::ALL.into_iter().find(|o| o.name() == name)
    }

    /// Admissible range.
    pub fn bounds(self) -> (f64, f64) {
        match self {
            Observable::Fidelity => (1.0 / 6.0, 1.0),
            Observable::Entropy1 => (0.0, 0.5),
            Observable::Conc12 | Observable::Conc13 | Observable::Conc34 => (0.0, 1.0),
            Observable::Entropy12 => (0.0, 0.75),
        }
    }

    /// Smallest network on which the observable is defined.
    pub fn min_nodes(self) -> usize {
        match self {
            Observable::Fidelity | Observable::Entropy1 | Observable::Conc12 => 2,
            Observable::Entropy12 => 2,
            Observable::Conc13 => 3,
            Observable::Conc34 => 4,
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Values of the six observables at one step; `None` where the network is too small.
pub type ObservableValues = [Option<f64>; 6];

/// Evaluates every observable defined at this width. Concurrences use the Wootters route.
pub fn evaluate_row(row: &MomentRow, width: usize) -> Result<ObservableValues> {
    let mut out = [None; 6];
    out[Observable::Fidelity.index()] = Some(avg_fidelity(row));
    out[Observable::Entropy1.index()] = Some(avg_linear_entropy_single(row));
    out[Observable::Entropy12.index()] = Some(linear_entropy_pair(row));
    for (obs, pair) in [
        (Observable::Conc12, QubitPair::OneTwo),
        (Observable::Conc13, QubitPair::OneThree),
        (Observable::Conc34, QubitPair::ThreeFour),
    ] {
        if width >= pair.min_width() {
            let rho = reduced_pair_state(row, width, pair)?;
            out[obs.index()] = Some(wootters_concurrence(&rho.matrix)?);
        }
    }
    Ok(out)
}

/// One row of an observable time series.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservablePoint {
    pub k: usize,
    pub t: f64,
    pub values: ObservableValues,
    pub errors: ObservableValues,
}

impl ObservablePoint {
    pub fn get(&self, obs: Observable) -> Option<f64> {
        self.values[obs.index()]
    }

    pub fn error(&self, obs: Observable) -> Option<f64> {
        self.errors[obs.index()]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObservableSeries {
    pub dt: f64,
    pub points: Vec<ObservablePoint>,
}

impl ObservableSeries {
    /// The values of one observable across steps (`NaN` where undefined).
    pub fn column(&self, obs: Observable) -> Vec<f64> {
        self.points.iter().map(|p| p.get(obs).unwrap_or(f64::NAN)).collect()
    }

    pub fn error_column(&self, obs: Observable) -> Vec<f64> {
        self.points.iter().map(|p| p.error(obs).unwrap_or(f64::NAN)).collect()
    }

    /// Attaches per-step standard errors as produced by [`standard_errors`].
    pub fn with_errors(mut self, errors: Vec<ObservableValues>) -> Result<Self> {
        if errors.len() != self.points.len() {
            return Err(Error::Shape(format!(
                "{} error rows for {} steps",
                errors.len(),
                self.points.len()
            )));
        }
        for (p, e) in self.points.iter_mut().zip(errors) {
            p.errors = e;
        }
        Ok(self)
    }
}

fn check_bounds(k: usize, values: &ObservableValues) -> Result<()> {
    for obs in Observable::ALL {
        if let Some(v) = values[obs.index()] {
            let (lo, hi) = obs.bounds();
            if !(v >= lo - BOUND_TOL && v <= hi + BOUND_TOL) {
                return Err(Error::Integrity {
                    step: k,
                    quantity: obs.column(),
                    value: v,
                    lo,
                    hi,
                });
            }
        }
    }
    Ok(())
}

/// All observables at every step, range-checked.
pub fn series(mom: &impl MomentSource, dt: f64) -> Result<ObservableSeries> {
    let width = mom.width();
    let points = (0..mom.n_points())
        .map(|k| {
            let row = mom
                .row(k)
                .ok_or_else(|| Error::Shape(format!("no moments at step {k}")))?;
            let values = evaluate_row(&row, width)?;
            check_bounds(k, &values)?;
            Ok(ObservablePoint {
                k,
                t: k as f64 * dt,
                values,
                errors: [None; 6],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ObservableSeries { dt, points })
}

/// Bootstrap standard error of every observable at every step.
pub fn standard_errors(acc: &EnsembleMoments, n_bootstrap: usize, seed: u64) -> Result<Vec<ObservableValues>> {
    let width = acc.width();
    let points = acc.n_points();
    let flat = bootstrap_standard_errors(acc, n_bootstrap, seed, |table| {
        table
            .rows
            .iter()
            .flat_map(|row| {
                evaluate_row(row, width)
                    .unwrap_or([Some(f64::NAN); 6])
                    .map(|v| v.unwrap_or(0.0))
            })
            .collect()
    })?;
    let defined: ObservableValues = evaluate_row(&MomentRow::initial(width), width)?;
    Ok((0..points)
        .map(|k| {
            let mut e = [None; 6];
            for obs in Observable::ALL {
                if defined[obs.index()].is_some() {
                    e[obs.index()] = Some(flat[k * 6 + obs.index()]);
                }
            }
            e
        })
        .collect())
}
