//! Plain ℓ₂-penalized regression on explicit features:
//! `w = (ZᵀZ/n + γI)⁻¹ (Zᵀy/n)`.

use ndarray::{Array1, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::Predict;
use crate::linalg;

/// Fitted ridge model on explicit features.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RidgeModel {
    pub weights: Array1<f64>,
    pub intercept: f64,
    pub gamma: f64,
}

impl RidgeModel {
    pub fn predict(&self, z: ArrayView2<'_, f64>) -> Result<Array1<f64>> {
        if z.ncols() != self.weights.len() {
            return Err(Error::DimensionMismatch(z.ncols(), self.weights.len()));
        }
        Ok(z.dot(&self.weights) + self.intercept)
    }
}

impl Predict for RidgeModel {
    fn predict(&self, x: ArrayView2<'_, f64>) -> Result<Array1<f64>> {
        RidgeModel::predict(self, x)
    }
}

/// Fit ridge regression. Requires `γ > 0` or full-rank features; a singular
/// system at `γ = 0` is reported as an error.
pub fn fit_ridge(
    z: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    gamma: f64,
    fit_intercept: bool,
) -> Result<RidgeModel> {
    let n = z.nrows();
    if n == 0 {
        return Err(Error::invalid_param("z", "need at least one row"));
    }
    if y.len() != n {
        return Err(Error::DimensionMismatch(y.len(), n));
    }
    if gamma < 0.0 || !gamma.is_finite() {
        return Err(Error::invalid_param("gamma", "must be finite and ≥ 0"));
    }
    let intercept = if fit_intercept { y.mean().unwrap_or(0.0) } else { 0.0 };
    let y_centered = y.mapv(|v| v - intercept);
    let n_f = n as f64;
    let mut a = z.t().dot(&z) / n_f;
    for i in 0..a.nrows() {
        a[[i, i]] += gamma;
    }
    let b = z.t().dot(&y_centered) / n_f;
    let weights = linalg::solve_spd(&a, &b)?;
    Ok(RidgeModel {
        weights,
        intercept,
        gamma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn strong_shrinkage_predicts_the_mean() {
        let z = array![[1.0], [2.0], [3.0], [4.0]];
        let y = array![2.0, 4.0, 6.0, 8.0];
        let model = fit_ridge(z.view(), y.view(), 1e9, true).unwrap();
        let preds = model.predict(z.view()).unwrap();
        let mean = 5.0;
        for p in preds.iter() {
            assert_abs_diff_eq!(*p, mean, epsilon = 1e-6);
        }
    }

    #[test]
    fn two_point_normal_equations_by_hand() {
        // z = [1, 3], y = [1, 2], γ = 0.5, intercept on.
        // ȳ = 1.5, centered y = [−0.5, 0.5].
        // ZᵀZ/n = (1 + 9)/2 = 5; Zᵀy_c/n = (1·−0.5 + 3·0.5)/2 = 0.5.
        // w = 0.5 / (5 + 0.5) = 1/11.
        let z = array![[1.0], [3.0]];
        let y = array![1.0, 2.0];
        let model = fit_ridge(z.view(), y.view(), 0.5, true).unwrap();
        assert_abs_diff_eq!(model.weights[0], 1.0 / 11.0, epsilon = 1e-12);
        assert_abs_diff_eq!(model.intercept, 1.5, epsilon = 1e-12);
    }

    #[test]
    fn interpolates_square_full_rank_at_zero_gamma() {
        let z = array![[1.0, 0.5, 0.0], [0.0, 2.0, 1.0], [1.0, -1.0, 3.0]];
        let y = array![0.3, -1.2, 2.0];
        let model = fit_ridge(z.view(), y.view(), 0.0, false).unwrap();
        let preds = model.predict(z.view()).unwrap();
        for (p, t) in preds.iter().zip(y.iter()) {
            assert_abs_diff_eq!(p, t, epsilon = 1e-8);
        }
    }

    #[test]
    fn singular_at_zero_gamma_is_an_error() {
        let z = array![[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]];
        let y = array![1.0, 2.0, 3.0];
        assert!(matches!(
            fit_ridge(z.view(), y.view(), 0.0, false),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn constant_labels_give_constant_predictions() {
        let z = array![[1.0, 0.0], [0.0, 1.0], [2.0, 2.0]];
        let y = array![3.0, 3.0, 3.0];
        for gamma in [0.0, 0.1, 10.0] {
            let model = fit_ridge(z.view(), y.view(), gamma, true).unwrap();
            let preds = model.predict(z.view()).unwrap();
            for p in preds.iter() {
                assert_abs_diff_eq!(*p, 3.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn training_error_nondecreasing_in_gamma() {
        let z = array![
            [1.0, 0.2],
            [0.3, 1.1],
            [-0.5, 0.7],
            [0.9, -0.4],
            [0.1, 0.1],
            [1.2, 0.8]
        ];
        let y = array![1.0, -0.5, 0.3, 0.8, 0.0, 1.4];
        let mut last = -1.0;
        for gamma in [1e-6, 1e-4, 1e-2, 1.0, 100.0] {
            let model = fit_ridge(z.view(), y.view(), gamma, true).unwrap();
            let preds = model.predict(z.view()).unwrap();
            let sse: f64 = preds
                .iter()
                .zip(y.iter())
                .map(|(p, t)| (p - t) * (p - t))
                .sum();
            assert!(sse + 1e-12 >= last, "training error fell: {last} -> {sse}");
            last = sse;
        }
    }
}
