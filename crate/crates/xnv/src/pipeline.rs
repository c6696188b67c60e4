//! The end-to-end two-view pipelines.
//!
//! `fit_xnv` composes the full semi-supervised procedure:
//!
//! 1. **Generate features** — sample 2M landmark points uniformly, build two
//!    disjoint Nyström maps from the first and last M, featurize every point
//!    (labeled and unlabeled).
//! 2. **Unlabeled data** — fit CCA across the two views on all N points and
//!    project view 1 into the canonical basis.
//! 3. **Labeled data** — fit canonical ridge on the n labeled projected rows.
//!
//! `fit_xks` is the same composition with the Nyström views replaced by a
//! single draw of 2M random Fourier features split in half; steps 2 and 3
//! are unchanged.

use std::path::Path;

use ndarray::{Array1, ArrayView1, ArrayView2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cca::{fit_cca, CcaModel, CcaRegularization, View};
use crate::data::Task;
use crate::error::{Error, Result};
use crate::estimators::{
    fit_canonical_ridge, sign_labels, CanonicalRidgeModel, Predict,
};
use crate::features::{
    fit_fourier, fit_nystrom, sample_landmark_pair, FeatureMap, DEFAULT_RANK_TOL,
};
use crate::kernels::KernelSpec;
use crate::util::select_rows;

/// A fitted two-view pipeline: feature maps, CCA projection, canonical ridge.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct XnvPipeline {
    kernel: KernelSpec,
    map1: FeatureMap,
    map2: FeatureMap,
    cca: CcaModel,
    model: CanonicalRidgeModel,
    task: Task,
}

impl XnvPipeline {
    pub fn kernel(&self) -> KernelSpec {
        self.kernel
    }

    pub fn cca(&self) -> &CcaModel {
        &self.cca
    }

    pub fn model(&self) -> &CanonicalRidgeModel {
        &self.model
    }

    pub fn maps(&self) -> (&FeatureMap, &FeatureMap) {
        (&self.map1, &self.map2)
    }

    pub fn task(&self) -> Task {
        self.task
    }

    /// Real-valued scores: apply view-1 features, project, apply weights.
    pub fn predict(&self, x: ArrayView2<'_, f64>) -> Result<Array1<f64>> {
        let z = self.map1.apply(x)?;
        let zbar = self.cca.project(View::One, z.view())?;
        self.model.predict(zbar.view())
    }

    /// {−1, +1} labels for classification tasks (ties to +1).
    pub fn predict_labels(&self, x: ArrayView2<'_, f64>) -> Result<Array1<f64>> {
        Ok(sign_labels(&self.predict(x)?))
    }

    /// Serialize the whole pipeline (kernel, maps, CCA bases, weights) as
    /// self-describing JSON. Floating point values round-trip exactly.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer(std::io::BufWriter::new(file), self)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Ok(serde_json::from_reader(std::io::BufReader::new(file))?)
    }
}

impl Predict for XnvPipeline {
    fn predict(&self, x: ArrayView2<'_, f64>) -> Result<Array1<f64>> {
        XnvPipeline::predict(self, x)
    }
}

/// Steps 2 and 3, shared by both pipelines.
fn assemble(
    spec: KernelSpec,
    map1: FeatureMap,
    map2: FeatureMap,
    x_all: ArrayView2<'_, f64>,
    labeled: &[usize],
    y: ArrayView1<'_, f64>,
    gamma: f64,
    reg: CcaRegularization,
    task: Task,
) -> Result<XnvPipeline> {
    let z1 = map1.apply(x_all)?;
    let z2 = map2.apply(x_all)?;
    let cca = fit_cca(z1.view(), z2.view(), reg)?;
    let zbar = cca.project(View::One, z1.view())?;
    let zbar_labeled = select_rows(zbar.view(), labeled);
    let mut model = fit_canonical_ridge(
        zbar_labeled.view(),
        y,
        cca.correlations().view(),
        gamma,
        crate::estimators::DEFAULT_LAMBDA_FLOOR,
        true,
    )?;
    model.task = task;
    Ok(XnvPipeline {
        kernel: spec,
        map1,
        map2,
        cca,
        model,
        task,
    })
}

fn check_inputs(
    x_all: ArrayView2<'_, f64>,
    labeled: &[usize],
    y: ArrayView1<'_, f64>,
) -> Result<()> {
    if labeled.is_empty() {
        return Err(Error::invalid_param("labeled", "need at least one index"));
    }
    if labeled.len() != y.len() {
        return Err(Error::DimensionMismatch(labeled.len(), y.len()));
    }
    if let Some(&bad) = labeled.iter().find(|&&i| i >= x_all.nrows()) {
        return Err(Error::invalid_param(
            "labeled",
            format!("index {bad} out of range for {} rows", x_all.nrows()),
        ));
    }
    Ok(())
}

/// Fit the Nyström-view pipeline.
///
/// `x_all` holds labeled and unlabeled rows together; `labeled` indexes into
/// it and `y` is aligned with `labeled`. Deterministic given the RNG state.
#[allow(clippy::too_many_arguments)]
pub fn fit_xnv<R: Rng>(
    spec: KernelSpec,
    x_all: ArrayView2<'_, f64>,
    labeled: &[usize],
    y: ArrayView1<'_, f64>,
    m: usize,
    gamma: f64,
    reg: CcaRegularization,
    rng: &mut R,
    task: Task,
) -> Result<XnvPipeline> {
    check_inputs(x_all, labeled, y)?;
    let (idx1, idx2) = sample_landmark_pair(x_all.nrows(), m, rng)?;
    let map1 = fit_nystrom(spec, select_rows(x_all, &idx1).view(), DEFAULT_RANK_TOL)?;
    let map2 = fit_nystrom(spec, select_rows(x_all, &idx2).view(), DEFAULT_RANK_TOL)?;
    assemble(
        spec,
        FeatureMap::Nystrom(map1),
        FeatureMap::Nystrom(map2),
        x_all,
        labeled,
        y,
        gamma,
        reg,
        task,
    )
}

/// Fit the random-Fourier-feature pipeline (correlated kitchen sinks).
///
/// Draws 2M frequencies in one batch and splits them into the two views;
/// the CCA and canonical ridge steps are identical to `fit_xnv`.
#[allow(clippy::too_many_arguments)]
pub fn fit_xks<R: Rng>(
    spec: KernelSpec,
    x_all: ArrayView2<'_, f64>,
    labeled: &[usize],
    y: ArrayView1<'_, f64>,
    m: usize,
    gamma: f64,
    reg: CcaRegularization,
    rng: &mut R,
    task: Task,
) -> Result<XnvPipeline> {
    check_inputs(x_all, labeled, y)?;
    let both = fit_fourier(spec, 2 * m, x_all.ncols(), rng)?;
    let (map1, map2) = both.split_pair(m)?;
    assemble(
        spec,
        FeatureMap::Fourier(map1),
        FeatureMap::Fourier(map2),
        x_all,
        labeled,
        y,
        gamma,
        reg,
        task,
    )
}
