//! Independent numerical oracles for the minsurf test suites.
//!
//! Everything here deliberately avoids the code paths it is used to check:
//! eigenvalues come from a two-sided Jacobi iteration on the Gram matrix
//! (plus closed-form characteristic polynomials for 2×2 and 3×3), matrix
//! norms from randomized maximization over unit vectors and orthonormal
//! 2-frames, and the Grassmannian heights from direct evaluation of the two
//! wedge forms on an explicit tangent frame.

mod eigen;
mod rng;
mod sampling;
mod wedge;

pub use eigen::{char_poly_eigenvalues_2x2, char_poly_eigenvalues_3x3, sym_eigenvalues};
pub use rng::SplitMix64;
pub use sampling::{sample_op_norm, sample_wedge2_norm};
pub use wedge::grassmann_heights_by_wedge;

/// Gram matrix JᵀJ of an m×n matrix given row-major (`rows[a * n + i]`).
pub fn gram(rows: &[f64], n: usize, m: usize) -> Vec<f64> {
    let mut g = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for a in 0..m {
                s += rows[a * n + i] * rows[a * n + j];
            }
            g[i * n + j] = s;
        }
    }
    g
}
