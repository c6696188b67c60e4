//! Simple semi-supervised learning on kernel eigenfunctions, exact and
//! Nyström-approximated.
//!
//! The exact form finds the top `s` eigenvectors of the full Gram matrix over
//! labeled and unlabeled points (the empirical eigenfunctions of the kernel
//! integral operator), restricts them to the labeled rows, and solves the
//! unpenalized least-squares problem
//!
//! ```text
//! argmin_w Σᵢ (Σⱼ wⱼ φⱼ(xᵢ) − yᵢ)².
//! ```
//!
//! Out-of-sample values of the eigenfunctions extend through the kernel:
//! `φⱼ(x) = (1/ℓⱼ) Σᵢ κ(x, xᵢ) vᵢⱼ`, which reproduces `vⱼ` on the fitting
//! points. The exact form costs O(N³) and is capped; the `_M` variant
//! replaces the full eigenbasis with an M-landmark Nyström map plus a ridge
//! penalty, which tunes more easily than the discrete cut-off `s`.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::ridge::{fit_ridge, RidgeModel};
use crate::estimators::Predict;
use crate::features::{fit_nystrom, NystromMap, DEFAULT_RANK_TOL};
use crate::kernels::KernelSpec;
use crate::linalg;
use crate::util::select_rows;

/// Largest N accepted by the exact eigendecomposition path.
pub const SSSL_EXACT_N_CAP: usize = 5000;

/// Fitted SSSL model, exact or Nyström-approximated.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum SsslModel {
    Exact {
        kernel: KernelSpec,
        train_x: Array2<f64>,
        /// Top-s eigenvectors of the Gram matrix, eigenvalue-descending.
        eigvecs: Array2<f64>,
        /// Matching eigenvalues, strictly positive.
        eigvals: Array1<f64>,
        /// Least-squares weights on the eigenfunction basis.
        weights: Array1<f64>,
        /// `V diag(1/ℓ) w`, so prediction is `κ(x, X) · coeffs + intercept`.
        coeffs: Array1<f64>,
        intercept: f64,
    },
    Nystrom { map: NystromMap, ridge: RidgeModel },
}

impl SsslModel {
    pub fn predict(&self, x: ArrayView2<'_, f64>) -> Result<Array1<f64>> {
        match self {
            SsslModel::Exact {
                kernel,
                train_x,
                coeffs,
                intercept,
                ..
            } => {
                let k = kernel.gram(x, train_x.view())?;
                Ok(k.dot(coeffs) + *intercept)
            }
            SsslModel::Nystrom { map, ridge } => {
                let z = map.apply(x)?;
                ridge.predict(z.view())
            }
        }
    }
}

impl Predict for SsslModel {
    fn predict(&self, x: ArrayView2<'_, f64>) -> Result<Array1<f64>> {
        SsslModel::predict(self, x)
    }
}

fn check_labeled(labeled: &[usize], n_total: usize, y_len: usize) -> Result<()> {
    if labeled.is_empty() {
        return Err(Error::invalid_param("labeled", "need at least one index"));
    }
    if labeled.len() != y_len {
        return Err(Error::DimensionMismatch(labeled.len(), y_len));
    }
    if let Some(&bad) = labeled.iter().find(|&&i| i >= n_total) {
        return Err(Error::invalid_param(
            "labeled",
            format!("index {bad} out of range for {n_total} rows"),
        ));
    }
    Ok(())
}

/// Exact SSSL: top-s Gram eigenvectors over all points, unpenalized least
/// squares on the labeled rows.
///
/// Errors when `N` exceeds [`SSSL_EXACT_N_CAP`] (use [`fit_sssl_m`] instead)
/// or when `s` exceeds the numerical rank of the Gram matrix.
pub fn fit_sssl_exact(
    spec: KernelSpec,
    x_all: ArrayView2<'_, f64>,
    labeled: &[usize],
    y: ArrayView1<'_, f64>,
    s: usize,
    fit_intercept: bool,
) -> Result<SsslModel> {
    let n_total = x_all.nrows();
    if n_total > SSSL_EXACT_N_CAP {
        return Err(Error::Infeasible(format!(
            "exact SSSL caps N at {SSSL_EXACT_N_CAP} (got {n_total}); use the Nyström \
             approximation fit_sssl_m for larger datasets"
        )));
    }
    if s == 0 {
        return Err(Error::invalid_param("s", "must be at least 1"));
    }
    check_labeled(labeled, n_total, y.len())?;

    let k = spec.gram_self(x_all);
    let (vals, vecs) = linalg::eigh_ascending(&k)?;
    let vals = vals.mapv(|v| v.max(0.0));
    let lambda_max = vals[vals.len() - 1];
    let rank = vals.iter().filter(|&&v| v > 1e-12 * lambda_max).count();
    if s > rank {
        return Err(Error::invalid_param(
            "s",
            format!("requested {s} eigenfunctions but the Gram matrix has rank {rank}"),
        ));
    }

    // Top-s eigenpairs, descending.
    let mut eigvals = Array1::zeros(s);
    let mut eigvecs = Array2::zeros((n_total, s));
    for j in 0..s {
        let idx = n_total - 1 - j;
        eigvals[j] = vals[idx];
        eigvecs.column_mut(j).assign(&vecs.column(idx));
    }

    let intercept = if fit_intercept { y.mean().unwrap_or(0.0) } else { 0.0 };
    let y_centered = y.mapv(|v| v - intercept);

    let phi_labeled = select_rows(eigvecs.view(), labeled);
    let weights = linalg::lstsq(&phi_labeled, &y_centered)?;

    let mut coeffs = Array1::zeros(n_total);
    for j in 0..s {
        let scale = weights[j] / eigvals[j];
        coeffs += &eigvecs.column(j).mapv(|v| v * scale);
    }

    Ok(SsslModel::Exact {
        kernel: spec,
        train_x: x_all.to_owned(),
        eigvecs,
        eigvals,
        weights,
        coeffs,
        intercept,
    })
}

/// Nyström-approximated SSSL: M landmarks sampled uniformly from the labeled
/// and unlabeled points jointly, ridge regression on the labeled features.
///
/// `SSSL_2M` is this operation called with `2M` landmarks.
pub fn fit_sssl_m<R: Rng>(
    spec: KernelSpec,
    x_all: ArrayView2<'_, f64>,
    labeled: &[usize],
    y: ArrayView1<'_, f64>,
    m: usize,
    gamma: f64,
    rng: &mut R,
    fit_intercept: bool,
) -> Result<SsslModel> {
    let n_total = x_all.nrows();
    if m == 0 || m > n_total {
        return Err(Error::invalid_param(
            "m",
            format!("must lie in 1..={n_total}, got {m}"),
        ));
    }
    check_labeled(labeled, n_total, y.len())?;

    let picks = rand::seq::index::sample(rng, n_total, m).into_vec();
    let landmarks = select_rows(x_all, &picks);
    let map = fit_nystrom(spec, landmarks.view(), DEFAULT_RANK_TOL)?;
    let z_labeled = map.apply(select_rows(x_all, labeled).view())?;
    let ridge = fit_ridge(z_labeled.view(), y, gamma, fit_intercept)?;
    Ok(SsslModel::Nystrom { map, ridge })
}
