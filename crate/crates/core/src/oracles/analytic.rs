//! Closed forms for the complete graph `K_N`.
//!
//! `A = J - I` has eigenvalue `N - 1` on the uniform vector and `-1` on its
//! complement, so `exp(-iAt) = e^{-i(N-1)t} J/N + e^{it} (I - J/N)`.

use num_complex::Complex64;

/// `u_11(t) = e^{it} [1 + (e^{-iNt} - 1)/N]`.
pub fn complete_graph_u11(n_nodes: usize, t: f64) -> Complex64 {
    let n = n_nodes as f64;
    let i = Complex64::i();
    (i * t).exp() * (1.0 + ((-i * n * t).exp() - 1.0) / n)
}

/// `u_ij(t)` for `i ≠ j`: `(e^{-i(N-1)t} - e^{it}) / N`.
pub fn complete_graph_u12(n_nodes: usize, t: f64) -> Complex64 {
    let n = n_nodes as f64;
    let i = Complex64::i();
    ((-i * (n - 1.0) * t).exp() - (i * t).exp()) / n
}

/// Average fidelity of a deterministic run on `K_N`.
pub fn complete_graph_fidelity(n_nodes: usize, t: f64) -> f64 {
    let u = complete_graph_u11(n_nodes, t);
    0.5 + u.re / 3.0 + u.norm_sqr() / 6.0
}

/// Average single-qubit linear entropy of a deterministic run on `K_N`.
pub fn complete_graph_entropy(n_nodes: usize, t: f64) -> f64 {
    let q = complete_graph_u11(n_nodes, t).norm_sqr();
    q - q / 3.0 - 2.0 * q * q / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn starts_at_identity() {
        assert!((complete_graph_u11(7, 0.0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(complete_graph_u12(7, 0.0).norm() < 1e-15);
    }

    #[test]
    fn first_column_is_normalized() {
        for t in [0.1, 1.3, 7.0] {
            let n = 9;
            let total = complete_graph_u11(n, t).norm_sqr() + (n - 1) as f64 * complete_graph_u12(n, t).norm_sqr();
            assert!((total - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn fidelity_is_two_pi_periodic() {
        for t in [0.3, 2.0, 5.5] {
            let a = complete_graph_fidelity(32, t);
            let b = complete_graph_fidelity(32, t + 2.0 * std::f64::consts::PI);
            assert!((a - b).abs() < 1e-12);
        }
    }
}
