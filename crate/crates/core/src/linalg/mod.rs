//! Minimal dense linear algebra: real and complex matrices, cyclic Jacobi
//! eigensolvers, a one-sided Jacobi SVD and LU determinants. Everything is
//! dependency-free and sized for the small dense problems in this crate.

mod cmat;
mod jacobi;
mod mat;
mod svd;

pub use cmat::{cdet, hdot, orthonormalize_rows_complex, CMat};
pub use jacobi::{herm_eig, sym_eig, unitary_eig, HermEig, SymEig, JACOBI_REL_TOL};
pub use mat::{det, dot, norm2, orthonormalize_rows, Mat};
pub use svd::{svd_square, Svd};

use crate::error::Result;

/// Applies a scalar function to a symmetric matrix through its
/// eigendecomposition: `f(m) = V diag(f(lambda)) V^T`.
pub fn spectral_map(eig: &SymEig, f: impl Fn(f64) -> f64) -> Mat {
    let n = eig.values.len();
    let lam = Mat::from_fn(n, n, |i, j| if i == j { f(eig.values[i]) } else { 0.0 });
    eig.vectors.matmul(&lam).matmul(&eig.vectors.transpose())
}

/// Symmetric matrix exponential via the spectral theorem.
pub fn sym_exp(m: &Mat) -> Result<Mat> {
    let eig = sym_eig(m)?;
    Ok(spectral_map(&eig, f64::exp).symmetrize())
}
