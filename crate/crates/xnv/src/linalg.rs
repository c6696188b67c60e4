//! Thin wrappers over the LAPACK-backed routines used across the crate.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Cholesky, Eigh, LeastSquaresSvd, SVD, UPLO};

use crate::error::{Error, Result};

// Linking for ndarray-linalg's `openblas-system` backend.
use openblas_src as _;

/// Symmetric eigendecomposition; eigenvalues ascending, eigenvectors in columns.
pub(crate) fn eigh_ascending(a: &Array2<f64>) -> Result<(Array1<f64>, Array2<f64>)> {
    let (vals, vecs) = a.eigh(UPLO::Lower)?;
    Ok((vals, vecs))
}

/// Solve the symmetric positive definite system `a x = b` via Cholesky.
///
/// Fails with [`Error::Singular`] when `a` is not positive definite.
pub(crate) fn solve_spd(a: &Array2<f64>, b: &Array1<f64>) -> Result<Array1<f64>> {
    let chol = a
        .cholesky(UPLO::Lower)
        .map_err(|e| Error::Singular(format!("system is not positive definite: {e}")))?;
    // L Lᵀ x = b: forward then backward substitution.
    let n = b.len();
    let mut y = b.clone();
    for i in 0..n {
        let mut s = y[i];
        for j in 0..i {
            s -= chol[[i, j]] * y[j];
        }
        y[i] = s / chol[[i, i]];
    }
    let mut x = y;
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in (i + 1)..n {
            s -= chol[[j, i]] * x[j];
        }
        x[i] = s / chol[[i, i]];
    }
    Ok(x)
}

/// Thin SVD `a = u diag(s) vᵀ` with both factor matrices returned.
pub(crate) fn svd_thin(a: &Array2<f64>) -> Result<(Array2<f64>, Array1<f64>, Array2<f64>)> {
    let (u, s, vt) = a.svd(true, true)?;
    let u = u.ok_or_else(|| Error::Linalg("SVD did not return U".into()))?;
    let vt = vt.ok_or_else(|| Error::Linalg("SVD did not return Vᵀ".into()))?;
    Ok((u, s, vt))
}

/// Minimum-norm least squares solution of `a x ≈ b`.
pub(crate) fn lstsq(a: &Array2<f64>, b: &Array1<f64>) -> Result<Array1<f64>> {
    let out = a.least_squares(b)?;
    Ok(out.solution)
}
