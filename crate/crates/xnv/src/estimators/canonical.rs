//! Canonical-norm-penalized ridge regression and the shrinkage closed form.
//!
//! On features `z̄` in the canonical basis with correlations `λ`, the weights
//! solve
//!
//! ```text
//! argmin_β (1/n) Σᵢ (yᵢ − βᵀ z̄ᵢ)² + ‖β‖²_CCA + γ‖β‖²,
//! ‖β‖²_CCA = Σⱼ ((1−λⱼ)/λⱼ) βⱼ²,
//! ```
//!
//! whose squared-loss closed form is `β̂ = (Z̄ᵀZ̄/n + Λ + γI)⁻¹ (Z̄ᵀy/n)` with
//! `Λ = diag((1−λⱼ)/λⱼ)`. Coordinates with `λⱼ` at or below a floor carry an
//! effectively infinite canonical penalty and are dropped outright.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::data::Task;
use crate::error::{Error, Result};
use crate::estimators::Predict;
use crate::linalg;

/// Default λ floor below which a canonical coordinate is dropped.
pub const DEFAULT_LAMBDA_FLOOR: f64 = 1e-6;

/// Fitted canonical ridge model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CanonicalRidgeModel {
    /// Weights β, one per canonical coordinate; zero at dropped coordinates.
    pub weights: Array1<f64>,
    pub intercept: f64,
    pub gamma: f64,
    /// Canonical correlations the model was fit against.
    pub correlations: Array1<f64>,
    /// Coordinates dropped because λⱼ ≤ λ_floor.
    pub dropped: Vec<usize>,
    pub task: Task,
}

impl CanonicalRidgeModel {
    /// Scores on rows already expressed in the canonical basis.
    pub fn predict(&self, zbar: ArrayView2<'_, f64>) -> Result<Array1<f64>> {
        if zbar.ncols() != self.weights.len() {
            return Err(Error::DimensionMismatch(zbar.ncols(), self.weights.len()));
        }
        Ok(zbar.dot(&self.weights) + self.intercept)
    }
}

impl Predict for CanonicalRidgeModel {
    fn predict(&self, x: ArrayView2<'_, f64>) -> Result<Array1<f64>> {
        CanonicalRidgeModel::predict(self, x)
    }
}

/// Fit canonical ridge by the closed form above.
///
/// `lambda` must be sorted descending with entries in [0, 1]; coordinates
/// with `λⱼ ≤ lambda_floor` are dropped. With `fit_intercept`, `y` is
/// centered first and the mean restored at prediction time.
pub fn fit_canonical_ridge(
    zbar: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    lambda: ArrayView1<'_, f64>,
    gamma: f64,
    lambda_floor: f64,
    fit_intercept: bool,
) -> Result<CanonicalRidgeModel> {
    let n = zbar.nrows();
    let p = zbar.ncols();
    if n == 0 {
        return Err(Error::invalid_param("zbar", "need at least one row"));
    }
    if y.len() != n {
        return Err(Error::DimensionMismatch(y.len(), n));
    }
    if lambda.len() != p {
        return Err(Error::DimensionMismatch(lambda.len(), p));
    }
    if gamma < 0.0 || !gamma.is_finite() {
        return Err(Error::invalid_param("gamma", "must be finite and ≥ 0"));
    }
    for w in lambda.windows(2) {
        if w[0] < w[1] {
            return Err(Error::invalid_param("lambda", "must be sorted descending"));
        }
    }
    if lambda.iter().any(|l| *l < 0.0 || *l > 1.0) {
        return Err(Error::invalid_param("lambda", "entries must lie in [0, 1]"));
    }

    let intercept = if fit_intercept { y.mean().unwrap_or(0.0) } else { 0.0 };
    let y_centered = y.mapv(|v| v - intercept);

    let kept: Vec<usize> = (0..p).filter(|&j| lambda[j] > lambda_floor).collect();
    let dropped: Vec<usize> = (0..p).filter(|&j| lambda[j] <= lambda_floor).collect();

    let mut weights = Array1::zeros(p);
    if !kept.is_empty() {
        let zk = select_columns(zbar, &kept);
        let n_f = n as f64;
        let mut a = zk.t().dot(&zk) / n_f;
        for (i, &j) in kept.iter().enumerate() {
            a[[i, i]] += (1.0 - lambda[j]) / lambda[j] + gamma;
        }
        let b = zk.t().dot(&y_centered) / n_f;
        let beta = linalg::solve_spd(&a, &b).map_err(|_| {
            Error::Singular(
                "canonical ridge system is singular; only possible at γ = 0 with \
                 duplicated λ = 1 columns"
                    .into(),
            )
        })?;
        for (i, &j) in kept.iter().enumerate() {
            weights[j] = beta[i];
        }
    }

    Ok(CanonicalRidgeModel {
        weights,
        intercept,
        gamma,
        correlations: lambda.to_owned(),
        dropped,
        task: Task::Regression,
    })
}

/// Canonical shrinkage estimator: `β̂ⱼ = (λⱼ/n) Σᵢ z̄ᵢⱼ yᵢ`.
///
/// This is the closed-form solution of the canonical ridge objective without
/// the extra ℓ₂ term when the features are exactly orthonormal.
pub fn canonical_shrinkage(
    zbar: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    lambda: ArrayView1<'_, f64>,
) -> Result<Array1<f64>> {
    let n = zbar.nrows();
    if y.len() != n {
        return Err(Error::DimensionMismatch(y.len(), n));
    }
    if lambda.len() != zbar.ncols() {
        return Err(Error::DimensionMismatch(lambda.len(), zbar.ncols()));
    }
    let n_f = n as f64;
    let corr = zbar.t().dot(&y) / n_f;
    Ok(&corr * &lambda)
}

fn select_columns(z: ArrayView2<'_, f64>, cols: &[usize]) -> Array2<f64> {
    let mut out = Array2::zeros((z.nrows(), cols.len()));
    for (i, &c) in cols.iter().enumerate() {
        out.column_mut(i).assign(&z.column(c));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn unit_correlations_reduce_to_least_squares() {
        // All λⱼ = 1, γ = 0: Λ = 0 and β̂ solves the plain normal equations.
        let zbar = array![[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [2.0, -1.0]];
        let y = array![1.0, 2.0, 3.5, 0.0];
        let lambda = array![1.0, 1.0];
        let model =
            fit_canonical_ridge(zbar.view(), y.view(), lambda.view(), 0.0, 1e-6, false).unwrap();

        let n = zbar.nrows() as f64;
        let a = zbar.t().dot(&zbar) / n;
        let b = zbar.t().dot(&y) / n;
        let ols = crate::linalg::solve_spd(&a, &b).unwrap();
        assert_abs_diff_eq!(model.weights[0], ols[0], epsilon = 1e-10);
        assert_abs_diff_eq!(model.weights[1], ols[1], epsilon = 1e-10);
    }

    #[test]
    fn scalar_closed_form() {
        // n = 1, z̄ = 1, y = 2, λ = 0.5, γ = 0: (1−λ)/λ = 1 and β̂ = (1+1)⁻¹·2 = 1.
        let zbar = array![[1.0]];
        let y = array![2.0];
        let lambda = array![0.5];
        let model =
            fit_canonical_ridge(zbar.view(), y.view(), lambda.view(), 0.0, 1e-6, false).unwrap();
        assert_abs_diff_eq!(model.weights[0], 1.0, epsilon = 1e-12);
        // and the shrinkage closed form matches: λ/n Σ z̄ y = 0.5·2 = 1
        let shrunk = canonical_shrinkage(zbar.view(), y.view(), lambda.view()).unwrap();
        assert_abs_diff_eq!(shrunk[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_lambda_coordinates_are_dropped() {
        let zbar = array![[1.0, 2.0], [2.0, -1.0], [0.5, 0.3]];
        let y = array![1.0, 0.0, 0.5];
        let lambda = array![0.9, 0.0];
        let model =
            fit_canonical_ridge(zbar.view(), y.view(), lambda.view(), 0.1, 1e-6, false).unwrap();
        assert_eq!(model.dropped, vec![1]);
        assert_eq!(model.weights[1], 0.0);
        assert!(model.weights[0] != 0.0);
    }

    #[test]
    fn shrinkage_kills_zero_lambda() {
        let zbar = array![[1.0, 3.0], [2.0, -1.0]];
        let y = array![1.0, 1.0];
        let lambda = array![1.0, 0.0];
        let shrunk = canonical_shrinkage(zbar.view(), y.view(), lambda.view()).unwrap();
        assert_eq!(shrunk[1], 0.0);
    }

    #[test]
    fn gamma_shrinks_weight_norm() {
        let zbar = array![
            [1.0, 0.2],
            [0.3, 1.1],
            [-0.5, 0.7],
            [0.9, -0.4],
            [0.1, 0.1]
        ];
        let y = array![1.0, -0.5, 0.3, 0.8, 0.0];
        let lambda = array![0.9, 0.6];
        let mut last_norm = f64::INFINITY;
        for gamma in [0.0, 0.01, 0.1, 1.0, 10.0] {
            let model =
                fit_canonical_ridge(zbar.view(), y.view(), lambda.view(), gamma, 1e-6, true)
                    .unwrap();
            let norm = model.weights.dot(&model.weights).sqrt();
            assert!(
                norm <= last_norm + 1e-12,
                "‖β‖ grew from {last_norm} to {norm} at γ = {gamma}"
            );
            last_norm = norm;
        }
    }

    #[test]
    fn unsorted_lambda_rejected() {
        let zbar = array![[1.0, 1.0]];
        let y = array![1.0];
        let lambda = array![0.3, 0.9];
        assert!(
            fit_canonical_ridge(zbar.view(), y.view(), lambda.view(), 0.0, 1e-6, false).is_err()
        );
    }

    #[test]
    fn duplicated_unit_lambda_columns_singular_at_zero_gamma() {
        let zbar = array![[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]];
        let y = array![1.0, 2.0, 3.0];
        let lambda = array![1.0, 1.0];
        assert!(matches!(
            fit_canonical_ridge(zbar.view(), y.view(), lambda.view(), 0.0, 1e-6, false),
            Err(Error::Singular(_))
        ));
    }
}
