//! Gaussian kernel evaluation and Gram matrix construction.
//!
//! The convention throughout the crate is
//!
//! ```text
//! κ(x, x') = exp(−σ ‖x − x'‖²),    σ > 0,
//! ```
//!
//! chosen so that the spectral measure of κ is exactly the Gaussian
//! `N(0, 2σ I_D)` from which random Fourier frequencies are drawn.
//! Note this is *not* the `exp(−‖x−x'‖²/2σ²)` parameterization; grids for σ
//! elsewhere in the crate are stated in this convention.

use ndarray::{Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gaussian kernel with bandwidth `sigma`, `κ(x, x') = exp(−sigma · ‖x − x'‖²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    sigma: f64,
}

impl KernelSpec {
    /// Create a kernel spec. `sigma` must be a positive finite real.
    pub fn new(sigma: f64) -> Result<Self> {
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::invalid_param(
                "sigma",
                format!("must be a positive finite real, got {sigma}"),
            ));
        }
        Ok(Self { sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Evaluate κ(x, x') for one pair of points.
    ///
    /// Returns a value in (0, 1], with κ(x, x) = 1.
    pub fn eval(&self, x: ArrayView1<'_, f64>, y: ArrayView1<'_, f64>) -> Result<f64> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch(x.len(), y.len()));
        }
        Ok(self.eval_unchecked(x, y))
    }

    #[inline]
    fn eval_unchecked(&self, x: ArrayView1<'_, f64>, y: ArrayView1<'_, f64>) -> f64 {
        let sq_dist: f64 = x
            .iter()
            .zip(y.iter())
            .map(|(a, b)| {
                let d = a - b;
                d * d
            })
            .sum();
        (-self.sigma * sq_dist).exp()
    }

    /// Cross-Gram matrix with entry (i, j) = κ(X_i, Y_j).
    ///
    /// Entries are filled row-major in a fixed loop order, so the result is
    /// reproducible bit-for-bit across runs.
    pub fn gram(&self, x: ArrayView2<'_, f64>, y: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if x.ncols() != y.ncols() {
            return Err(Error::DimensionMismatch(x.ncols(), y.ncols()));
        }
        let mut k = Array2::zeros((x.nrows(), y.nrows()));
        for i in 0..x.nrows() {
            let xi = x.row(i);
            for j in 0..y.nrows() {
                k[[i, j]] = self.eval_unchecked(xi, y.row(j));
            }
        }
        Ok(k)
    }

    /// Symmetric Gram matrix of a single point set.
    ///
    /// Computes the upper triangle once and mirrors it, so the result is
    /// exactly symmetric with unit diagonal.
    pub fn gram_self(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        let n = x.nrows();
        let mut k = Array2::zeros((n, n));
        for i in 0..n {
            k[[i, i]] = 1.0;
            let xi = x.row(i);
            for j in (i + 1)..n {
                let v = self.eval_unchecked(xi, x.row(j));
                k[[i, j]] = v;
                k[[j, i]] = v;
            }
        }
        k
    }
}
