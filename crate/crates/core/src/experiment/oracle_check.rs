//! Cross-checks the Monte Carlo pipeline against the reference engines.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::TrajectoryParams;
use crate::error::{Error, Result};
use crate::graph::EnsembleSpec;
use crate::moments::simulate_ensemble;
use crate::observables::{series, standard_errors, Observable};
use crate::oracles::{build_exact_maps, exact_moment_series, subspace_fullspace_deviation};

use super::config::ExperimentConfig;
use super::runner::bootstrap_seed;

/// Largest network the check accepts.
pub const ORACLE_MAX_NODES: usize = 6;
/// Resamples used when the config leaves bootstrap off.
pub const DEFAULT_ORACLE_BOOTSTRAP: usize = 200;
/// Fraction of steps that must agree within 4 SE.
pub const REQUIRED_FRACTION: f64 = 0.95;
/// Absolute slack added to `4 SE`, for steps where the ensemble has no spread.
pub const ROUNDOFF_FLOOR: f64 = 1e-10;
pub const FULLSPACE_TOLERANCE: f64 = 1e-10;
pub const FULLSPACE_SEQUENCES: usize = 20;
pub const FULLSPACE_LENGTH: usize = 10;

const COMPARED: [Observable; 4] = [
    Observable::Fidelity,
    Observable::Entropy1,
    Observable::Conc12,
    Observable::Entropy12,
];

#[derive(Clone, Debug, PartialEq)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    /// Measured deviation, in whatever unit the check uses.
    pub deviation: f64,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OracleReport {
    pub lines: Vec<CheckLine>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.passed)
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lines {
            let tag = if l.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{tag} {}: {}", l.name, l.detail)?;
        }
        Ok(())
    }
}

/// Fraction of steps where `|mc - exact| <= 4 se + floor`, and the worst
/// deviation in units of SE (infinite where SE is zero and the floor is exceeded).
pub fn agreement(mc: &[f64], exact: &[f64], se: &[f64], floor: f64) -> (f64, f64) {
    let mut ok = 0usize;
    let mut worst = 0.0f64;
    for ((&m, &e), &s) in mc.iter().zip(exact).zip(se) {
        let diff = (m - e).abs();
        if diff <= 4.0 * s + floor {
            ok += 1;
        }
        let z = if diff <= floor { 0.0 } else if s > 0.0 { diff / s } else { f64::INFINITY };
        worst = worst.max(z);
    }
    (ok as f64 / mc.len().max(1) as f64, worst)
}

fn label(spec: &EnsembleSpec) -> String {
    match *spec {
        EnsembleSpec::Gilbert { n_nodes, xi } => format!("N={n_nodes} xi={xi}"),
        EnsembleSpec::Thermal { n_nodes, temperature } => format!("N={n_nodes} T={temperature}"),
    }
}

fn check_point(cfg: &ExperimentConfig, spec: &EnsembleSpec, report: &mut OracleReport) -> Result<()> {
    let tag = label(spec);
    let mut params = TrajectoryParams::new(cfg.dt, cfg.n_steps);
    params.coupling_scale = cfg.coupling_scale;

    let maps = build_exact_maps(spec, cfg.dt, cfg.coupling_scale)?;
    let exact = series(&exact_moment_series(&maps, cfg.n_steps)?, cfg.dt)?;
    let acc = simulate_ensemble(spec, &params, cfg.master_seed, 0, cfg.n_realizations, true)?;
    let mc = series(&acc, cfg.dt)?;
    let b = cfg.bootstrap.unwrap_or(DEFAULT_ORACLE_BOOTSTRAP);
    let mc = mc.with_errors(standard_errors(&acc, b, bootstrap_seed(cfg.master_seed))?)?;

    for obs in COMPARED {
        let (fraction, worst) = agreement(
            &mc.column(obs),
            &exact.column(obs),
            &mc.error_column(obs),
            ROUNDOFF_FLOOR,
        );
        report.lines.push(CheckLine {
            name: format!("exact-ensemble {tag} {}", obs.column()),
            passed: fraction >= REQUIRED_FRACTION,
            deviation: worst,
            detail: format!(
                "{:.1}% of {} steps within 4 SE (need {:.0}%), worst {worst:.2} SE, M={}",
                100.0 * fraction,
                cfg.n_steps + 1,
                100.0 * REQUIRED_FRACTION,
                cfg.n_realizations
            ),
        });
    }

    let sampler = spec.sampler()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.master_seed);
    rng.set_stream(u64::MAX);
    let mut worst = 0.0f64;
    for _ in 0..FULLSPACE_SEQUENCES {
        let graphs = (0..FULLSPACE_LENGTH)
            .map(|_| sampler.sample(&mut rng))
            .collect::<Result<Vec<_>>>()?;
        let theta = rng.random_range(0.0..std::f64::consts::PI);
        let phi = rng.random_range(0.0..std::f64::consts::TAU);
        let c0 = Complex64::new((theta / 2.0).cos(), 0.0);
        let c1 = Complex64::from_polar((theta / 2.0).sin(), phi);
        worst = worst.max(subspace_fullspace_deviation(&graphs, cfg.dt, cfg.coupling_scale, c0, c1)?);
    }
    report.lines.push(CheckLine {
        name: format!("full-space {tag}"),
        passed: worst < FULLSPACE_TOLERANCE,
        deviation: worst,
        detail: format!(
            "max entry deviation {worst:.3e} over {FULLSPACE_SEQUENCES} sequences of {FULLSPACE_LENGTH} steps \
             (need < {FULLSPACE_TOLERANCE:e})"
        ),
    });
    Ok(())
}

/// Runs both oracle comparisons for every point of `cfg`. Networks above
/// [`ORACLE_MAX_NODES`] are rejected with a resource-limit error.
pub fn oracle_check(cfg: &ExperimentConfig) -> Result<OracleReport> {
    if let Some(&n) = cfg.nodes.iter().find(|&&n| n > ORACLE_MAX_NODES) {
        return Err(Error::ResourceLimit(format!(
            "oracle check supports networks of at most {ORACLE_MAX_NODES} nodes, got {n}"
        )));
    }
    let mut checked = cfg.clone();
    if checked.bootstrap.is_none() {
        checked.bootstrap = Some(DEFAULT_ORACLE_BOOTSTRAP);
    }
    checked.validate()?;
    let mut report = OracleReport::default();
    for point in checked.points()? {
        check_point(&checked, &point.spec, &mut report)?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::config::ConfigOverrides;

    #[test]
    fn rejects_large_networks() {
        let cfg = ConfigOverrides {
            nodes: Some(vec![7]),
            ..Default::default()
        }
        .resolve()
        .unwrap();
        assert!(matches!(oracle_check(&cfg), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn small_check_passes() {
        let cfg = ConfigOverrides {
            nodes: Some(vec![4]),
            xi_list: Some(vec![0.3]),
            n_steps: Some(10),
            n_realizations: Some(2000),
            bootstrap: Some(Some(100)),
            ..Default::default()
        }
        .resolve()
        .unwrap();
        let report = oracle_check(&cfg).unwrap();
        assert_eq!(report.lines.len(), 5);
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn agreement_counts_steps() {
        let (f, w) = agreement(&[0.0, 1.0], &[0.0, 0.0], &[0.0, 0.1], 1e-12);
        assert_eq!(f, 0.5);
        assert_eq!(w, 10.0);
    }
}
