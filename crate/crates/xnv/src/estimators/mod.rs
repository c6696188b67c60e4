//! Supervised fitting procedures: canonical ridge, canonical shrinkage,
//! plain ridge, kernel ridge regression, and the SSSL family.
//!
//! All fitters take a `fit_intercept` flag. With it off, the closed forms are
//! solved on the raw targets exactly as written; with it on, targets are
//! mean-centered before solving and the mean is restored at prediction time,
//! which keeps normalized-MSE comparisons meaningful for targets with
//! nonzero mean.

mod canonical;
mod krr;
mod ridge;
mod sssl;

pub use canonical::{
    canonical_shrinkage, fit_canonical_ridge, CanonicalRidgeModel, DEFAULT_LAMBDA_FLOOR,
};
pub use krr::{fit_krr, krr_weights_from_gram, KrrModel};
pub use ridge::{fit_ridge, RidgeModel};
pub use sssl::{fit_sssl_exact, fit_sssl_m, SsslModel, SSSL_EXACT_N_CAP};

use ndarray::{Array1, ArrayView2};

use crate::error::Result;

/// Real-valued score prediction on a batch of inputs.
///
/// Raw-input models (KRR, SSSL, fitted pipelines) expect rows in the original
/// input space; feature-space models (ridge, canonical ridge) expect rows in
/// their feature space.
pub trait Predict {
    fn predict(&self, x: ArrayView2<'_, f64>) -> Result<Array1<f64>>;
}

/// Threshold scores into {−1, +1} labels, ties broken to +1.
pub fn sign_labels(scores: &Array1<f64>) -> Array1<f64> {
    scores.mapv(|s| if s >= 0.0 { 1.0 } else { -1.0 })
}
