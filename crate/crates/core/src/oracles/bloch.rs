//! Bloch-sphere averages by quadrature.
//!
//! Qubit 1 starts in `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`. For given ensemble
//! moments the averaged reduced state `ρ1(θ, φ)` is formed explicitly, and
//! fidelity `|⟨ψ|ρ1|ψ⟩|` and linear entropy `1 - Tr ρ1²` are integrated over
//! the sphere with the uniform measure `sin θ dθ dφ / 4π`.
//!
//! The `θ` integral runs in `x = cos θ` with Gauss–Legendre nodes and the `φ`
//! integral with the periodic trapezoid rule; both integrands are low-degree
//! polynomials in `x` and trigonometric polynomials in `φ`, so the rules are
//! exact up to round-off.

use std::f64::consts::PI;

use nalgebra::Vector2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::observables::{linear_entropy, single_qubit_state};

const THETA_NODES: usize = 16;
const PHI_NODES: usize = 32;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                // P_n(x) and P_n'(x) by the three-term recurrence
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                let pn = if n == 0 { 1.0 } else { p1 };
                let pn_1 = if n == 1 { 1.0 } else { p0 };
                dp = n as f64 * (x * pn - pn_1) / (x * x - 1.0);
                let step = pn / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Sphere-averaged `(fidelity, linear entropy)` of qubit 1 given `E(u11)` and `E|u11|²`.
pub fn bloch_average_numeric(mean_u11: Complex64, mean_u11_abs2: f64) -> Result<(f64, f64)> {
    const TOL: f64 = 1e-12;
    if !(mean_u11.norm_sqr() <= mean_u11_abs2 + TOL && mean_u11_abs2 <= 1.0 + TOL && mean_u11_abs2 >= -TOL) {
        return Err(Error::domain(
            "moments",
            format!("need |E u11|^2 <= E|u11|^2 <= 1, got E u11 = {mean_u11}, E|u11|^2 = {mean_u11_abs2}"),
        ));
    }
    let nodes = gauss_legendre(THETA_NODES);
    let (mut fidelity, mut entropy) = (0.0, 0.0);
    for &(x, w) in &nodes {
        let half = x.acos() / 2.0;
        for p in 0..PHI_NODES {
            let phi = 2.0 * PI * p as f64 / PHI_NODES as f64;
            let c0 = Complex64::new(half.cos(), 0.0);
            let c1 = Complex64::from_polar(half.sin(), phi);
            let rho = single_qubit_state(c0, c1, mean_u11, mean_u11_abs2);
            let psi = Vector2::new(c0, c1);
            let overlap = (psi.adjoint() * rho * psi)[(0, 0)].norm();
            let weight = w / (2.0 * PHI_NODES as f64);
            fidelity += weight * overlap;
            entropy += weight * linear_entropy(&rho);
        }
    }
    Ok((fidelity, entropy))
}
