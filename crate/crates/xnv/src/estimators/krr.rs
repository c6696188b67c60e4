//! Kernel ridge regression, the fully supervised baseline.
//!
//! Dual weights solve `(K + nγI) α = y`; prediction at `x` is
//! `Σᵢ αᵢ κ(xᵢ, x)`.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::Predict;
use crate::kernels::KernelSpec;
use crate::linalg;

/// Fitted kernel ridge regression model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KrrModel {
    pub alpha: Array1<f64>,
    pub intercept: f64,
    pub gamma: f64,
    pub kernel: KernelSpec,
    train_x: Array2<f64>,
}

impl KrrModel {
    pub fn train_x(&self) -> ArrayView2<'_, f64> {
        self.train_x.view()
    }

    pub fn predict(&self, x: ArrayView2<'_, f64>) -> Result<Array1<f64>> {
        let k = self.kernel.gram(x, self.train_x.view())?;
        Ok(k.dot(&self.alpha) + self.intercept)
    }
}

impl Predict for KrrModel {
    fn predict(&self, x: ArrayView2<'_, f64>) -> Result<Array1<f64>> {
        KrrModel::predict(self, x)
    }
}

/// Solve the dual system on a precomputed (possibly approximate) Gram matrix.
///
/// Returns `(α, intercept)`. The system `K + nγI` is positive definite for
/// any PSD `K` and `γ > 0`.
pub fn krr_weights_from_gram(
    k: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    gamma: f64,
    fit_intercept: bool,
) -> Result<(Array1<f64>, f64)> {
    let n = k.nrows();
    if k.ncols() != n {
        return Err(Error::DimensionMismatch(k.ncols(), n));
    }
    if y.len() != n {
        return Err(Error::DimensionMismatch(y.len(), n));
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::invalid_param("gamma", "must be finite and > 0"));
    }
    let intercept = if fit_intercept { y.mean().unwrap_or(0.0) } else { 0.0 };
    let y_centered = y.mapv(|v| v - intercept);
    let mut a = k.to_owned();
    let shift = n as f64 * gamma;
    for i in 0..n {
        a[[i, i]] += shift;
    }
    let alpha = linalg::solve_spd(&a, &y_centered)?;
    Ok((alpha, intercept))
}

/// Fit kernel ridge regression on raw inputs. Requires `γ > 0`.
pub fn fit_krr(
    spec: KernelSpec,
    x: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    gamma: f64,
    fit_intercept: bool,
) -> Result<KrrModel> {
    let k = spec.gram_self(x);
    let (alpha, intercept) = krr_weights_from_gram(k.view(), y, gamma, fit_intercept)?;
    Ok(KrrModel {
        alpha,
        intercept,
        gamma,
        kernel: spec,
        train_x: x.to_owned(),
    })
}
