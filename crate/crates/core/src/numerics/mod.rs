//! Small dense linear-algebra kernel shared by every other module.
//!
//! Decompositions are delegated to `nalgebra`; this module owns the row-major
//! matrix type, the seeded random stream and the handful of vector helpers the
//! solvers use in their inner loops.

mod decomp;
mod matrix;
mod rng;

pub use decomp::{
    condition_number, eigenvalues, orthonormal_column_basis, random_orthogonal, singular_values,
    solve_linear, spectral_norm, symmetric_eigenvalues, MAX_CONDITION,
};
pub use matrix::{ComplexScalar, DenseMatrix};
pub use rng::{SeededRng, RNG_ALGORITHM_ID};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

/// `‖a - b‖²`
pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|v| v.is_finite())
}
