//! Canonical correlation analysis between two feature views.
//!
//! Given paired views `Z⁽¹⁾` (N×r₁) and `Z⁽²⁾` (N×r₂), CCA finds basis pairs
//! maximizing the correlation of the projected coordinates,
//!
//! ```text
//! argmax  corr(b⁽¹⁾ᵀ z⁽¹⁾, b⁽²⁾ᵀ z⁽²⁾),
//! ```
//!
//! with subsequent pairs orthogonal to earlier ones. On the fitting sample the
//! projections `Z̄⁽ᵛ⁾` satisfy, with 1/N normalization,
//!
//! * orthogonality: `(1/N) Z̄⁽ᵛ⁾ᵀ Z̄⁽ᵛ⁾ = I`, and
//! * correlation: `(1/N) Z̄⁽¹⁾ᵀ Z̄⁽²⁾ = diag(λ)` with `1 ≥ λ₁ ≥ … ≥ λ_p ≥ 0`.
//!
//! The implementation whitens each view exactly on the subspace where its
//! covariance eigenvalues exceed the floor ε (directions below the floor are
//! discarded — random-feature covariances are routinely ill-conditioned and
//! amplifying near-null directions would destroy the properties above), then
//! takes the SVD of the whitened cross-covariance. Views are mean-centered
//! first; correlation is a centered quantity.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Covariance eigenvalue floor used for whitening.
///
/// `Relative(f)` resolves to `f · mean(diag(C))` per view, the default with
/// `f = 1e−6`; `Absolute(e)` uses `e` for both views.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CcaRegularization {
    Absolute(f64),
    Relative(f64),
}

impl Default for CcaRegularization {
    fn default() -> Self {
        CcaRegularization::Relative(1e-6)
    }
}

/// Which of the two views to project.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum View {
    One,
    Two,
}

/// Fitted CCA model: centering offsets, paired bases and canonical correlations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CcaModel {
    mean1: Array1<f64>,
    mean2: Array1<f64>,
    basis1: Array2<f64>,
    basis2: Array2<f64>,
    /// Canonical correlations, descending, clamped into [0, 1].
    correlations: Array1<f64>,
}

impl CcaModel {
    pub fn correlations(&self) -> &Array1<f64> {
        &self.correlations
    }

    /// Number of canonical pairs p ≤ min(r₁, r₂).
    pub fn n_components(&self) -> usize {
        self.correlations.len()
    }

    pub fn basis(&self, view: View) -> ArrayView2<'_, f64> {
        match view {
            View::One => self.basis1.view(),
            View::Two => self.basis2.view(),
        }
    }

    /// Project rows of `z` into the canonical basis: `(z − mean) · B`.
    pub fn project(&self, view: View, z: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        let (mean, basis) = match view {
            View::One => (&self.mean1, &self.basis1),
            View::Two => (&self.mean2, &self.basis2),
        };
        if z.ncols() != mean.len() {
            return Err(Error::DimensionMismatch(z.ncols(), mean.len()));
        }
        let mut centered = z.to_owned();
        for mut row in centered.rows_mut() {
            row -= mean;
        }
        Ok(centered.dot(basis))
    }
}

fn check_finite(z: ArrayView2<'_, f64>, name: &'static str) -> Result<()> {
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(name));
    }
    Ok(())
}

/// Center a view and return (centered, mean).
fn center(z: ArrayView2<'_, f64>) -> (Array2<f64>, Array1<f64>) {
    let mean = z.mean_axis(Axis(0)).expect("nonempty view");
    let mut centered = z.to_owned();
    for mut row in centered.rows_mut() {
        row -= &mean;
    }
    (centered, mean)
}

/// Whitening transform `W` with `Wᵀ C W = I` on the retained subspace.
///
/// Eigenpairs of `C` with eigenvalue ≤ `floor` are dropped; the returned
/// matrix has one column per retained direction, scaled by `1/sqrt(s)`.
fn whitener(cov: &Array2<f64>, floor: f64) -> Result<Array2<f64>> {
    let (vals, vecs) = linalg::eigh_ascending(cov)?;
    let kept: Vec<usize> = (0..vals.len()).rev().filter(|&i| vals[i] > floor).collect();
    if kept.is_empty() {
        return Err(Error::Degenerate(
            "view covariance has no eigenvalue above the whitening floor".into(),
        ));
    }
    let mut w = Array2::zeros((cov.nrows(), kept.len()));
    for (out, &idx) in kept.iter().enumerate() {
        let scale = vals[idx].sqrt().recip();
        w.column_mut(out).assign(&vecs.column(idx).mapv(|v| v * scale));
    }
    Ok(w)
}

/// Fit CCA on two paired views.
///
/// Covariances use 1/N normalization. Requires `N > max(r₁, r₂)` and finite
/// inputs. The canonical correlations are the singular values of the whitened
/// cross-covariance, clamped into [0, 1].
pub fn fit_cca(
    z1: ArrayView2<'_, f64>,
    z2: ArrayView2<'_, f64>,
    reg: CcaRegularization,
) -> Result<CcaModel> {
    if z1.nrows() != z2.nrows() {
        return Err(Error::DimensionMismatch(z1.nrows(), z2.nrows()));
    }
    let n = z1.nrows();
    let (r1, r2) = (z1.ncols(), z2.ncols());
    if n <= r1.max(r2) {
        return Err(Error::Infeasible(format!(
            "CCA needs more samples than features: N = {n}, max(r1, r2) = {}",
            r1.max(r2)
        )));
    }
    check_finite(z1, "CCA view 1")?;
    check_finite(z2, "CCA view 2")?;

    let (c1, mean1) = center(z1);
    let (c2, mean2) = center(z2);
    let n_f = n as f64;
    let cov11 = c1.t().dot(&c1) / n_f;
    let cov22 = c2.t().dot(&c2) / n_f;
    let cov12 = c1.t().dot(&c2) / n_f;

    let floor = |cov: &Array2<f64>| -> f64 {
        match reg {
            CcaRegularization::Absolute(e) => e,
            CcaRegularization::Relative(f) => {
                let mean_diag = cov.diag().mean().unwrap_or(0.0);
                f * mean_diag
            }
        }
    };
    let w1 = whitener(&cov11, floor(&cov11))?;
    let w2 = whitener(&cov22, floor(&cov22))?;

    let t = w1.t().dot(&cov12).dot(&w2);
    let (u, s, vt) = linalg::svd_thin(&t)?;
    let p = s.len();
    let correlations = s.mapv(|v| v.clamp(0.0, 1.0));
    let basis1 = w1.dot(&u.slice(ndarray::s![.., ..p]));
    let basis2 = w2.dot(&vt.slice(ndarray::s![..p, ..]).t());

    Ok(CcaModel {
        mean1,
        mean2,
        basis1,
        basis2,
        correlations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;
    use rand::prelude::*;
    use rand_chacha::ChaCha20Rng;
    use rand_distr::StandardNormal;

    fn gaussian(n: usize, d: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        Array2::from_shape_fn((n, d), |_| rng.sample(StandardNormal))
    }

    fn projected_cov(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
        a.t().dot(b) / a.nrows() as f64
    }

    #[test]
    fn identical_views_give_unit_correlations() {
        let z = gaussian(400, 5, 1);
        let model = fit_cca(z.view(), z.view(), CcaRegularization::Absolute(1e-8)).unwrap();
        assert_eq!(model.n_components(), 5);
        for l in model.correlations().iter() {
            assert!(*l >= 0.999, "correlation {l}");
            assert!(*l <= 1.0);
        }
    }

    #[test]
    fn independent_noise_has_small_correlations() {
        let z1 = gaussian(10_000, 5, 2);
        let z2 = gaussian(10_000, 5, 3);
        let model = fit_cca(z1.view(), z2.view(), CcaRegularization::default()).unwrap();
        for l in model.correlations().iter() {
            assert!(*l <= 0.1, "null-case correlation {l}");
        }
    }

    #[test]
    fn invariant_under_orthogonal_transform_of_a_view() {
        let z1 = gaussian(300, 4, 4);
        let mut z2 = gaussian(300, 4, 5);
        // correlate the views
        z2 = &z2 * 0.3 + &z1 * 0.7;

        let base = fit_cca(z1.view(), z2.view(), CcaRegularization::Absolute(1e-10)).unwrap();

        // Orthogonal 4×4 transform (Householder reflector).
        let v = ndarray::array![0.5, -0.5, 0.5, 0.5];
        let q = Array2::eye(4) - 2.0 * outer(&v, &v);
        let z2q = z2.dot(&q);
        let transformed =
            fit_cca(z1.view(), z2q.view(), CcaRegularization::Absolute(1e-10)).unwrap();

        for (a, b) in base
            .correlations()
            .iter()
            .zip(transformed.correlations().iter())
        {
            assert_abs_diff_eq!(a, b, epsilon = 1e-6);
        }
    }

    fn outer(a: &ndarray::Array1<f64>, b: &ndarray::Array1<f64>) -> Array2<f64> {
        let mut m = Array2::zeros((a.len(), b.len()));
        for i in 0..a.len() {
            for j in 0..b.len() {
                m[[i, j]] = a[i] * b[j];
            }
        }
        m
    }

    #[test]
    fn training_projections_orthonormal_and_correlated() {
        let z1 = gaussian(500, 4, 6);
        let shared = gaussian(500, 4, 7);
        let z1 = &z1 * 0.5 + &shared;
        let z2 = &gaussian(500, 4, 8) * 0.5 + &shared;

        let model = fit_cca(z1.view(), z2.view(), CcaRegularization::default()).unwrap();
        let p1 = model.project(View::One, z1.view()).unwrap();
        let p2 = model.project(View::Two, z2.view()).unwrap();

        let c11 = projected_cov(&p1, &p1);
        let c22 = projected_cov(&p2, &p2);
        let c12 = projected_cov(&p1, &p2);
        let p = model.n_components();
        for i in 0..p {
            for j in 0..p {
                let eye = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(c11[[i, j]], eye, epsilon = 1e-6);
                assert_abs_diff_eq!(c22[[i, j]], eye, epsilon = 1e-6);
                let lam = if i == j { model.correlations()[i] } else { 0.0 };
                assert_abs_diff_eq!(c12[[i, j]], lam, epsilon = 1e-6);
            }
        }
        // correlations sorted descending
        for w in model.correlations().windows(2) {
            assert!(w[0] >= w[1] - 1e-12);
        }
    }

    #[test]
    fn projection_is_pure() {
        let z1 = gaussian(100, 3, 9);
        let z2 = gaussian(100, 3, 10);
        let model = fit_cca(z1.view(), z2.view(), CcaRegularization::default()).unwrap();
        let row = z1.slice(ndarray::s![..1, ..]);
        let a = model.project(View::One, row).unwrap();
        let b = model.project(View::One, row).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_underdetermined_and_nonfinite() {
        let z1 = gaussian(4, 5, 11);
        let z2 = gaussian(4, 5, 12);
        assert!(fit_cca(z1.view(), z2.view(), CcaRegularization::default()).is_err());

        let mut z1 = gaussian(50, 3, 13);
        let z2 = gaussian(50, 3, 14);
        z1[[0, 0]] = f64::NAN;
        assert!(matches!(
            fit_cca(z1.view(), z2.view(), CcaRegularization::default()),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn project_dimension_mismatch() {
        let z1 = gaussian(60, 3, 15);
        let z2 = gaussian(60, 3, 16);
        let model = fit_cca(z1.view(), z2.view(), CcaRegularization::default()).unwrap();
        let bad = gaussian(5, 4, 17);
        assert!(model.project(View::One, bad.view()).is_err());
    }
}
