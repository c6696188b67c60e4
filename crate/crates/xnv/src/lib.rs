//! Correlated random-feature views for fast semi-supervised learning.
//!
//! The central idea: build **two** cheap random approximations of the same
//! Gaussian kernel (Nyström landmarks or random Fourier features), use
//! canonical correlation analysis on *unlabeled* data to find the directions
//! the two views agree on, then regress on the *labeled* data with a penalty
//! that shrinks the directions they disagree on. Features that are noise in
//! one random draw are uncorrelated with the other draw, so the canonical
//! penalty suppresses them without a tuning parameter.
//!
//! # Quick start
//!
//! ```rust
//! use ndarray::Array1;
//! use rand::SeedableRng;
//! use rand_chacha::ChaCha20Rng;
//! use xnv::{fit_xnv, CcaRegularization, KernelSpec, Task};
//!
//! // A toy semi-supervised problem: 200 points, only the first 40 labeled.
//! let kernel = KernelSpec::new(0.5)?;
//! let data = xnv::synth_rkhs(kernel, 200, 2, 5, 0.05, 7)?;
//! let labeled: Vec<usize> = (0..40).collect();
//! let y: Array1<f64> = labeled.iter().map(|&i| data.dataset.y[i]).collect();
//!
//! let mut rng = ChaCha20Rng::seed_from_u64(0);
//! let pipeline = fit_xnv(
//!     kernel,
//!     data.dataset.x.view(),
//!     &labeled,
//!     y.view(),
//!     20,                          // M features per view
//!     1e-3,                        // γ
//!     CcaRegularization::default(),
//!     &mut rng,
//!     Task::Regression,
//! )?;
//! let predictions = pipeline.predict(data.dataset.x.view())?;
//! assert_eq!(predictions.len(), 200);
//! # Ok::<(), xnv::Error>(())
//! ```
//!
//! # Modules
//!
//! - [`kernels`] — Gaussian kernel and Gram matrices.
//! - [`features`] — Nyström and random Fourier feature maps.
//! - [`cca`] — canonical correlation analysis between views.
//! - [`estimators`] — canonical ridge, plain ridge, KRR, and the SSSL family.
//! - [`data`] — CSV ingestion, standardization, splits, synthetic data.
//! - [`pipeline`] — the end-to-end compositions `fit_xnv` / `fit_xks`.
//! - [`experiments`] — the reproducible benchmark harness behind the CLI.

pub mod cca;
pub mod data;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod features;
pub mod kernels;
mod linalg;
pub mod pipeline;
mod util;

pub use cca::{fit_cca, CcaModel, CcaRegularization, View};
pub use data::{
    load_csv, make_split, save_csv, standardize, synth_rkhs, CsvSchema, Dataset, SplitPlan,
    StandardizationParams, SynthDataset, Task,
};
pub use error::{Error, Result};
pub use estimators::{
    canonical_shrinkage, fit_canonical_ridge, fit_krr, fit_ridge, fit_sssl_exact, fit_sssl_m,
    sign_labels, CanonicalRidgeModel, KrrModel, Predict, RidgeModel, SsslModel,
};
pub use experiments::{
    evaluate, ExperimentConfig, Method, SynthSpec,
};
pub use features::{
    fit_fourier, fit_nystrom, sample_landmark_pair, FeatureMap, FourierMap, NystromMap,
};
pub use kernels::KernelSpec;
pub use pipeline::{fit_xks, fit_xnv, XnvPipeline};
