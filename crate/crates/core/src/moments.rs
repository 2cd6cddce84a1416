//! Ensemble moments of the propagator.
//!
//! Every observable of interest depends on the propagator only through
//!
//! * `u11 = u_{11}(t_k)` (first and second moments), and
//! * `m_j = u_{1j}(t_k) + u_{2j}(t_k)` for `j = 1..4`, through the Gram
//!   matrix `E(m_j m_l*)`.
//!
//! These are extracted per trajectory and averaged per step.
//!
//! Sums are kept in 2⁻⁹⁶ fixed point (`i128`). Integer addition is associative,
//! so the ensemble mean is bit-identical however the trajectories are split
//! between workers or merged.

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dynamics::{run_trajectory_with, Propagator, TrajectoryParams, TrajectorySeed};
use crate::error::{Error, Result};
use crate::graph::EnsembleSpec;

/// Number of `m_j` combinations tracked.
pub const PAIR_WIDTH: usize = 4;

/// Moments of a single propagator at one step.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryMomentRecord {
    pub step_index: usize,
    pub u11: Complex64,
    pub u11_abs2: f64,
    /// `m_j = u_{1j} + u_{2j}`; entries past `width` are zero.
    pub m: [Complex64; PAIR_WIDTH],
    /// `min(N, 4)`. Anything below 4 means the Gram is restricted to the nodes that exist.
    pub width: usize,
    /// `Σ_j |m_j|²` over all `N` nodes; 2 for a unitary propagator.
    pub m_norm_check: f64,
}

impl TrajectoryMomentRecord {
    /// Rank-one Gram `m_j m_l*`.
    pub fn m_gram(&self) -> Matrix4<Complex64> {
        Matrix4::from_fn(|j, l| self.m[j] * self.m[l].conj())
    }

    pub fn gram_restricted(&self) -> bool {
        self.width < PAIR_WIDTH
    }
}

/// Pulls the tracked entries out of `𝒰(t_k)`. Needs at least two nodes.
pub fn extract_record(p: &Propagator) -> Result<TrajectoryMomentRecord> {
    let n = p.n_nodes();
    let cols = p.matrix().columns(0, 2.min(n));
    record_from_columns(p.step_index(), &cols.map(|z| z.re), &cols.map(|z| z.im))
}

/// Same as [`extract_record`], from the images of `|1⟩` and `|2⟩` alone,
/// split into real and imaginary parts.
pub(crate) fn record_from_columns(
    step_index: usize,
    re: &DMatrix<f64>,
    im: &DMatrix<f64>,
) -> Result<TrajectoryMomentRecord> {
    let n = re.nrows();
    if n < 2 {
        return Err(Error::Unsupported(format!(
            "pair observables need at least 2 nodes, network has {n}"
        )));
    }
    let width = n.min(PAIR_WIDTH);
    let u11 = Complex64::new(re[(0, 0)], im[(0, 0)]);
    let mut m = [Complex64::new(0.0, 0.0); PAIR_WIDTH];
    let mut m_norm_check = 0.0;
    for j in 0..n {
        let mj = Complex64::new(re[(j, 0)] + re[(j, 1)], im[(j, 0)] + im[(j, 1)]);
        m_norm_check += mj.norm_sqr();
        if j < width {
            m[j] = mj;
        }
    }
    Ok(TrajectoryMomentRecord {
        step_index,
        u11,
        u11_abs2: u11.norm_sqr(),
        m,
        width,
        m_norm_check,
    })
}

/// Ensemble means at one step.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentRow {
    pub mean_u11: Complex64,
    pub mean_u11_abs2: f64,
    /// `E(m_j m_l*)`, zero outside the tracked width.
    pub mean_m_gram: Matrix4<Complex64>,
}

impl MomentRow {
    /// Moments of the identity propagator, i.e. of `t = 0`.
    pub fn initial(width: usize) -> Self {
        let mut gram = Matrix4::zeros();
        for j in 0..2.min(width) {
            for l in 0..2.min(width) {
                gram[(j, l)] = Complex64::new(1.0, 0.0);
            }
        }
        MomentRow {
            mean_u11: Complex64::new(1.0, 0.0),
            mean_u11_abs2: 1.0,
            mean_m_gram: gram,
        }
    }

    /// Checks `|E u11|² ≤ E|u11|² ≤ 1` and that the Gram is Hermitian PSD
    /// with trace at most 2, all up to `tol`.
    pub fn is_admissible(&self, tol: f64) -> bool {
        let first = self.mean_u11.norm_sqr();
        if first > self.mean_u11_abs2 + tol || self.mean_u11_abs2 > 1.0 + tol {
            return false;
        }
        let g = &self.mean_m_gram;
        if (g - g.adjoint()).iter().any(|z| z.norm() > tol) {
            return false;
        }
        if g.trace().re > 2.0 + tol {
            return false;
        }
        min_hermitian_eigenvalue(g) >= -tol
    }
}

impl From<&TrajectoryMomentRecord> for MomentRow {
    /// The moments of a one-trajectory ensemble.
    fn from(r: &TrajectoryMomentRecord) -> Self {
        row_from_means(&record_slots(r))
    }
}

/// Smallest eigenvalue of the Hermitian part of `g`.
pub fn min_hermitian_eigenvalue(g: &Matrix4<Complex64>) -> f64 {
    let herm = (g + g.adjoint()).scale(0.5);
    herm.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Anything that can hand out per-step moment rows.
pub trait MomentSource {
    /// Number of steps covered, counting step 0.
    fn n_points(&self) -> usize;
    /// How many of `m_1..m_4` exist (`min(N, 4)`).
    fn width(&self) -> usize;
    fn row(&self, k: usize) -> Option<MomentRow>;
}

/// Plain table of per-step means, e.g. from an exact oracle or a bootstrap resample.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentTable {
    pub width: usize,
    pub rows: Vec<MomentRow>,
}

impl MomentSource for MomentTable {
    fn n_points(&self) -> usize {
        self.rows.len()
    }

    fn width(&self) -> usize {
        self.width
    }

    fn row(&self, k: usize) -> Option<MomentRow> {
        self.rows.get(k).cloned()
    }
}

const FIXED_SCALE: f64 = 79_228_162_514_264_337_593_543_950_336.0; // 2^96

#[inline]
fn to_fixed(x: f64) -> i128 {
    (x * FIXED_SCALE).round() as i128
}

#[inline]
fn from_fixed(sum: i128, count: usize) -> f64 {
    sum as f64 / FIXED_SCALE / count as f64
}

// Layout of one step's sums: u11 (re, im), |u11|², gram diagonal (4),
// gram strict upper triangle (6 complex = 12).
const SLOTS: usize = 3 + PAIR_WIDTH + 12;
const UPPER: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

fn record_slots(r: &TrajectoryMomentRecord) -> [f64; SLOTS] {
    let mut s = [0.0; SLOTS];
    s[0] = r.u11.re;
    s[1] = r.u11.im;
    s[2] = r.u11_abs2;
    for j in 0..PAIR_WIDTH {
        s[3 + j] = r.m[j].norm_sqr();
    }
    for (slot, &(j, l)) in UPPER.iter().enumerate() {
        let z = r.m[j] * r.m[l].conj();
        s[3 + PAIR_WIDTH + 2 * slot] = z.re;
        s[3 + PAIR_WIDTH + 2 * slot + 1] = z.im;
    }
    s
}

fn row_from_means(means: &[f64; SLOTS]) -> MomentRow {
    let mut gram = Matrix4::zeros();
    for j in 0..PAIR_WIDTH {
        gram[(j, j)] = Complex64::new(means[3 + j], 0.0);
    }
    for (slot, &(j, l)) in UPPER.iter().enumerate() {
        let z = Complex64::new(
            means[3 + PAIR_WIDTH + 2 * slot],
            means[3 + PAIR_WIDTH + 2 * slot + 1],
        );
        gram[(j, l)] = z;
        gram[(l, j)] = z.conj();
    }
    MomentRow {
        mean_u11: Complex64::new(means[0], means[1]),
        mean_u11_abs2: means[2],
        mean_m_gram: gram,
    }
}

/// Running ensemble accumulator over a fixed step grid.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleMoments {
    width: usize,
    n_realizations: usize,
    sums: Vec<[i128; SLOTS]>,
    retained: Option<Vec<Vec<TrajectoryMomentRecord>>>,
}

impl EnsembleMoments {
    /// Empty accumulator for `n_points` steps (step 0 included). With
    /// `retain`, every trajectory's records are kept for bootstrapping.
    pub fn new(n_points: usize, width: usize, retain: bool) -> Self {
        EnsembleMoments {
            width,
            n_realizations: 0,
            sums: vec![[0; SLOTS]; n_points],
            retained: retain.then(Vec::new),
        }
    }

    pub fn n_realizations(&self) -> usize {
        self.n_realizations
    }

    pub fn retains_records(&self) -> bool {
        self.retained.is_some()
    }

    pub fn trajectories(&self) -> Option<&[Vec<TrajectoryMomentRecord>]> {
        self.retained.as_deref()
    }

    /// Adds one trajectory's record sequence.
    pub fn accumulate(&mut self, records: Vec<TrajectoryMomentRecord>) -> Result<()> {
        if records.len() != self.sums.len() {
            return Err(Error::Shape(format!(
                "trajectory has {} steps, accumulator expects {}",
                records.len(),
                self.sums.len()
            )));
        }
        if let Some(bad) = records.iter().find(|r| r.width != self.width) {
            return Err(Error::Shape(format!(
                "record width {} does not match accumulator width {}",
                bad.width, self.width
            )));
        }
        for r in &records {
            if let Some(x) = record_slots(r).into_iter().find(|x| !x.is_finite()) {
                return Err(Error::Integrity {
                    step: r.step_index,
                    quantity: "moment",
                    value: x,
                    lo: f64::MIN,
                    hi: f64::MAX,
                });
            }
        }
        for (sum, r) in self.sums.iter_mut().zip(&records) {
            for (acc, x) in sum.iter_mut().zip(record_slots(r)) {
                *acc += to_fixed(x);
            }
        }
        self.n_realizations += 1;
        if let Some(kept) = self.retained.as_mut() {
            kept.push(records);
        }
        Ok(())
    }

    /// Folds `other` into `self`; `other`'s trajectories are taken to follow `self`'s.
    pub fn merge(&mut self, other: EnsembleMoments) -> Result<()> {
        if other.sums.len() != self.sums.len() || other.width != self.width {
            return Err(Error::Shape(format!(
                "cannot merge {} steps x width {} into {} steps x width {}",
                other.sums.len(),
                other.width,
                self.sums.len(),
                self.width
            )));
        }
        for (a, b) in self.sums.iter_mut().zip(&other.sums) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        self.n_realizations += other.n_realizations;
        match (self.retained.as_mut(), other.retained) {
            (Some(mine), Some(theirs)) => mine.extend(theirs),
            (Some(_), None) => self.retained = None,
            _ => {}
        }
        Ok(())
    }

    /// Snapshot of the current means.
    pub fn table(&self) -> MomentTable {
        MomentTable {
            width: self.width,
            rows: (0..self.sums.len()).filter_map(|k| self.row(k)).collect(),
        }
    }
}

impl MomentSource for EnsembleMoments {
    fn n_points(&self) -> usize {
        self.sums.len()
    }

    fn width(&self) -> usize {
        self.width
    }

    fn row(&self, k: usize) -> Option<MomentRow> {
        if self.n_realizations == 0 {
            return None;
        }
        let sum = self.sums.get(k)?;
        let mut means = [0.0; SLOTS];
        for (m, &s) in means.iter_mut().zip(sum) {
            *m = from_fixed(s, self.n_realizations);
        }
        Some(row_from_means(&means))
    }
}

/// Runs trajectories `first_index .. first_index + count` of the ensemble
/// keyed by `master_seed` and accumulates them, in parallel on the current
/// rayon pool. The result does not depend on the pool size.
pub fn simulate_ensemble(
    spec: &EnsembleSpec,
    params: &TrajectoryParams,
    master_seed: u64,
    first_index: u64,
    count: usize,
    retain: bool,
) -> Result<EnsembleMoments> {
    params.validate()?;
    let sampler = spec.sampler()?;
    let n = spec.n_nodes();
    if n < 2 {
        return Err(Error::Unsupported(format!(
            "pair observables need at least 2 nodes, network has {n}"
        )));
    }
    let width = n.min(PAIR_WIDTH);
    let points = params.n_steps + 1;
    let run = |i: u64| run_trajectory_with(&sampler, params, TrajectorySeed::new(master_seed, first_index + i));

    if retain {
        let all: Vec<Vec<TrajectoryMomentRecord>> =
            (0..count as u64).into_par_iter().map(run).collect::<Result<_>>()?;
        let mut acc = EnsembleMoments::new(points, width, true);
        for records in all {
            acc.accumulate(records)?;
        }
        Ok(acc)
    } else {
        (0..count as u64)
            .into_par_iter()
            .try_fold(
                || EnsembleMoments::new(points, width, false),
                |mut acc, i| {
                    acc.accumulate(run(i)?)?;
                    Ok(acc)
                },
            )
            .try_reduce(
                || EnsembleMoments::new(points, width, false),
                |mut a, b| {
                    a.merge(b)?;
                    Ok(a)
                },
            )
    }
}

/// Bootstrap over trajectories: `n_bootstrap` resamples (with replacement) of
/// the retained trajectories, each turned into a [`MomentTable`] and reduced
/// by `statistic` to a fixed-length vector. Returns the per-component sample
/// standard deviation across resamples. Components that come out non-finite
/// in any resample yield `NaN`.
pub fn bootstrap_standard_errors<F>(
    acc: &EnsembleMoments,
    n_bootstrap: usize,
    seed: u64,
    statistic: F,
) -> Result<Vec<f64>>
where
    F: Fn(&MomentTable) -> Vec<f64> + Sync,
{
    let trajectories = acc.trajectories().ok_or_else(|| {
        Error::Unsupported("bootstrap needs per-trajectory records; run with retention on".into())
    })?;
    let m = trajectories.len();
    if m < 2 {
        return Err(Error::domain("n_realizations", format!("bootstrap needs at least 2 trajectories, got {m}")));
    }
    if n_bootstrap < 2 {
        return Err(Error::domain("n_bootstrap", format!("need at least 2 resamples, got {n_bootstrap}")));
    }
    let points = acc.n_points();
    let width = acc.width();
    let slots: Vec<Vec<[f64; SLOTS]>> = trajectories
        .iter()
        .map(|t| t.iter().map(record_slots).collect())
        .collect();

    let replicates: Vec<Vec<f64>> = (0..n_bootstrap as u64)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let mut weight = vec![0u32; m];
            for _ in 0..m {
                weight[rng.random_range(0..m)] += 1;
            }
            let rows = (0..points)
                .map(|k| {
                    let mut means = [0.0; SLOTS];
                    for (traj, &w) in slots.iter().zip(&weight) {
                        if w == 0 {
                            continue;
                        }
                        for (acc, x) in means.iter_mut().zip(&traj[k]) {
                            *acc += f64::from(w) * x;
                        }
                    }
                    for x in means.iter_mut() {
                        *x /= m as f64;
                    }
                    row_from_means(&means)
                })
                .collect();
            statistic(&MomentTable { width, rows })
        })
        .collect();

    let dim = replicates[0].len();
    let b = replicates.len() as f64;
    Ok((0..dim)
        .map(|c| {
            let mean = replicates.iter().map(|r| r[c]).sum::<f64>() / b;
            let var = replicates.iter().map(|r| (r[c] - mean).powi(2)).sum::<f64>() / (b - 1.0);
            var.sqrt()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{expm_step, generator_from_graph};
    use crate::graph::AdjacencyMatrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn record_with_u11(u11: Complex64) -> TrajectoryMomentRecord {
        TrajectoryMomentRecord {
            step_index: 0,
            u11,
            u11_abs2: u11.norm_sqr(),
            m: [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            width: 4,
            m_norm_check: 1.0,
        }
    }

    #[test]
    fn identity_record() {
        let r = extract_record(&Propagator::identity(5)).unwrap();
        assert_eq!(r.u11, c(1.0, 0.0));
        assert_eq!(r.u11_abs2, 1.0);
        let g = r.m_gram();
        assert_eq!(g[(0, 0)], c(1.0, 0.0));
        assert_eq!(g[(0, 1)], c(1.0, 0.0));
        assert_eq!(g[(2, 2)], c(0.0, 0.0));
        assert_eq!(r.m_norm_check, 2.0);
        assert!(!r.gram_restricted());
    }

    #[test]
    fn small_networks() {
        assert!(matches!(extract_record(&Propagator::identity(1)), Err(Error::Unsupported(_))));
        let r = extract_record(&Propagator::identity(3)).unwrap();
        assert_eq!(r.width, 3);
        assert!(r.gram_restricted());
        assert_eq!(r.m[3], c(0.0, 0.0));
    }

    #[test]
    fn single_edge_record() {
        let t = 0.83;
        let h = generator_from_graph(&AdjacencyMatrix::complete(2), 1.0).unwrap();
        let p = Propagator::identity(2).compose(&expm_step(&h, t).unwrap()).unwrap();
        let r = extract_record(&p).unwrap();
        assert!((r.u11 - c(t.cos(), 0.0)).norm() < 1e-14);
        let m = c(t.cos(), -t.sin());
        assert!((r.m[0] - m).norm() < 1e-14);
        assert!((r.m[1] - m).norm() < 1e-14);
        assert!((r.m_gram()[(0, 1)] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((r.m_norm_check - 2.0).abs() < 1e-14);
    }

    #[test]
    fn accumulate_single_trajectory_reproduces_it() {
        let mut acc = EnsembleMoments::new(1, 4, false);
        let r = record_with_u11(c(0.25, -0.5));
        acc.accumulate(vec![r.clone()]).unwrap();
        let row = acc.row(0).unwrap();
        assert_eq!(row.mean_u11, r.u11);
        assert_eq!(row.mean_u11_abs2, r.u11_abs2);
        assert_eq!(row.mean_m_gram, r.m_gram());
    }

    #[test]
    fn opposite_u11_average_out() {
        let mut acc = EnsembleMoments::new(1, 4, false);
        acc.accumulate(vec![record_with_u11(c(1.0, 0.0))]).unwrap();
        acc.accumulate(vec![record_with_u11(c(-1.0, 0.0))]).unwrap();
        let row = acc.row(0).unwrap();
        assert_eq!(row.mean_u11, c(0.0, 0.0));
        assert_eq!(row.mean_u11_abs2, 1.0);
    }

    #[test]
    fn grid_mismatch_is_a_shape_error() {
        let mut acc = EnsembleMoments::new(3, 4, false);
        let err = acc.accumulate(vec![record_with_u11(c(1.0, 0.0))]);
        assert!(matches!(err, Err(Error::Shape(_))));
        let other = EnsembleMoments::new(2, 4, false);
        assert!(acc.merge(other).is_err());
    }

    #[test]
    fn empty_accumulator_has_no_rows() {
        let acc = EnsembleMoments::new(3, 4, false);
        assert!(acc.row(0).is_none());
    }

    #[test]
    fn merge_matches_concatenation_bitwise() {
        let spec = EnsembleSpec::gilbert(5, 0.4).unwrap();
        let params = TrajectoryParams::new(0.1, 15);
        let whole = simulate_ensemble(&spec, &params, 17, 0, 12, false).unwrap();
        let mut left = simulate_ensemble(&spec, &params, 17, 0, 5, false).unwrap();
        let right = simulate_ensemble(&spec, &params, 17, 5, 7, false).unwrap();
        left.merge(right).unwrap();
        assert_eq!(left.table(), whole.table());
        assert_eq!(left.n_realizations(), 12);
    }

    #[test]
    fn retention_does_not_change_means() {
        let spec = EnsembleSpec::gilbert(4, 0.3).unwrap();
        let params = TrajectoryParams::new(0.1, 5);
        let a = simulate_ensemble(&spec, &params, 3, 0, 9, false).unwrap();
        let b = simulate_ensemble(&spec, &params, 3, 0, 9, true).unwrap();
        assert_eq!(a.table(), b.table());
        assert_eq!(b.trajectories().unwrap().len(), 9);
    }

    #[test]
    fn initial_row_matches_identity_record() {
        let r = extract_record(&Propagator::identity(6)).unwrap();
        assert_eq!(MomentRow::initial(4).mean_m_gram, r.m_gram());
    }

    #[test]
    fn bootstrap_needs_records() {
        let spec = EnsembleSpec::gilbert(4, 0.3).unwrap();
        let params = TrajectoryParams::new(0.1, 2);
        let acc = simulate_ensemble(&spec, &params, 3, 0, 4, false).unwrap();
        let err = bootstrap_standard_errors(&acc, 10, 1, |_| vec![0.0]);
        assert!(matches!(err, Err(Error::Unsupported(_))));
        let single = simulate_ensemble(&spec, &params, 3, 0, 1, true).unwrap();
        assert!(bootstrap_standard_errors(&single, 10, 1, |_| vec![0.0]).is_err());
    }

    #[test]
    fn identical_trajectories_have_zero_error() {
        let mut acc = EnsembleMoments::new(1, 4, true);
        for _ in 0..5 {
            acc.accumulate(vec![record_with_u11(c(0.3, 0.1))]).unwrap();
        }
        let se = bootstrap_standard_errors(&acc, 50, 2, |t| vec![t.rows[0].mean_u11.re]).unwrap();
        assert!(se[0].abs() < 1e-15);
    }

    #[test]
    fn non_finite_records_are_rejected() {
        let mut acc = EnsembleMoments::new(1, 4, false);
        let bad = record_with_u11(c(f64::NAN, 0.0));
        assert!(matches!(acc.accumulate(vec![bad]), Err(Error::Integrity { .. })));
        assert_eq!(acc.n_realizations(), 0);
    }
}
