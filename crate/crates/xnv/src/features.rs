//! Random feature maps: Nyström landmarks and random Fourier features.
//!
//! Both maps produce finite-dimensional features `z(x)` whose inner products
//! approximate the Gaussian kernel, `z(x)ᵀ z(x') ≈ κ(x, x')`.
//!
//! The Nyström map is data dependent: it samples `M` landmark points, forms
//! their Gram matrix `K̂`, and maps
//!
//! ```text
//! z(x) = D̂^{−1/2} V̂ᵀ [κ(x, x̂_1), …, κ(x, x̂_M)]ᵀ,
//! ```
//!
//! where `K̂ = V̂ D̂ V̂ᵀ` is the eigendecomposition restricted to eigenvalues
//! above a relative threshold. The implied Gram `Z Zᵀ` equals the low-rank
//! approximation `K_{NM} K̂† K_{MN}`.
//!
//! The Fourier map is data independent: frequencies are drawn from the
//! kernel's spectral measure `N(0, 2σ I_D)` and
//!
//! ```text
//! z(x)_m = sqrt(2/M) · cos(ω_mᵀ x + b_m),    b_m ~ Unif[−π, π],
//! ```
//!
//! the scaling under which `E[z(x)ᵀ z(x')] = κ(x, x')` holds exactly.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;

/// Default relative eigenvalue threshold for Nyström rank truncation.
///
/// Eigenvalues of `K̂` below `DEFAULT_RANK_TOL · λ_max` are discarded; this
/// suppresses numerically negative eigenvalues without dropping informative
/// directions.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Fitted Nyström feature map.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NystromMap {
    kernel: KernelSpec,
    landmarks: Array2<f64>,
    /// Retained eigenvectors of the landmark Gram matrix, M×r, eigenvalue-descending.
    eigvecs: Array2<f64>,
    /// Retained eigenvalues, strictly positive, descending.
    eigvals: Array1<f64>,
    /// Columns of `eigvecs` scaled by `1/sqrt(eigval)`; `z(x) = k(x, landmarks) · basis`.
    basis: Array2<f64>,
    rank_tol: f64,
}

impl NystromMap {
    pub fn kernel(&self) -> KernelSpec {
        self.kernel
    }

    pub fn landmarks(&self) -> ArrayView2<'_, f64> {
        self.landmarks.view()
    }

    pub fn eigvecs(&self) -> ArrayView2<'_, f64> {
        self.eigvecs.view()
    }

    pub fn eigvals(&self) -> &Array1<f64> {
        &self.eigvals
    }

    /// Retained rank r (output feature dimension).
    pub fn rank(&self) -> usize {
        self.eigvals.len()
    }

    /// Input dimension D.
    pub fn input_dim(&self) -> usize {
        self.landmarks.ncols()
    }

    /// Featurize rows of `x`: row i is `D̂^{−1/2} V̂ᵀ k(x_i, landmarks)`.
    pub fn apply(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.landmarks.ncols() {
            return Err(Error::DimensionMismatch(x.ncols(), self.landmarks.ncols()));
        }
        let k = self.kernel.gram(x, self.landmarks.view())?;
        Ok(k.dot(&self.basis))
    }
}

/// Sample 2M distinct row indices uniformly without replacement and split
/// them into the first M (view 1) and last M (view 2).
///
/// Deterministic given the RNG state.
pub fn sample_landmark_pair<R: Rng>(
    n_rows: usize,
    m: usize,
    rng: &mut R,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if m == 0 {
        return Err(Error::invalid_param("m", "must be at least 1"));
    }
    if 2 * m > n_rows {
        return Err(Error::Infeasible(format!(
            "need 2M = {} landmark rows but the dataset has only {n_rows}",
            2 * m
        )));
    }
    let picks = rand::seq::index::sample(rng, n_rows, 2 * m).into_vec();
    let view2 = picks[m..].to_vec();
    let mut view1 = picks;
    view1.truncate(m);
    Ok((view1, view2))
}

/// Eigendecompose the landmark Gram matrix and retain eigenpairs above
/// `rank_tol · λ_max`, stored in descending order.
pub fn fit_nystrom(
    spec: KernelSpec,
    landmarks: ArrayView2<'_, f64>,
    rank_tol: f64,
) -> Result<NystromMap> {
    if !(rank_tol > 0.0 && rank_tol < 1.0) {
        return Err(Error::invalid_param(
            "rank_tol",
            format!("must lie in (0, 1), got {rank_tol}"),
        ));
    }
    if landmarks.nrows() == 0 {
        return Err(Error::invalid_param("landmarks", "need at least one row"));
    }
    let k_hat = spec.gram_self(landmarks);
    let (vals, vecs) = crate::linalg::eigh_ascending(&k_hat)?;
    // Clamp numerically negative eigenvalues before thresholding.
    let vals = vals.mapv(|v| v.max(0.0));
    let lambda_max = vals[vals.len() - 1];
    let threshold = rank_tol * lambda_max;
    let kept: Vec<usize> = (0..vals.len())
        .rev()
        .filter(|&i| vals[i] > threshold)
        .collect();
    if kept.is_empty() {
        return Err(Error::Degenerate(
            "all landmark Gram eigenvalues fall below the rank threshold".into(),
        ));
    }
    let m = landmarks.nrows();
    let r = kept.len();
    let mut eigvals = Array1::zeros(r);
    let mut eigvecs = Array2::zeros((m, r));
    for (out, &idx) in kept.iter().enumerate() {
        eigvals[out] = vals[idx];
        eigvecs.column_mut(out).assign(&vecs.column(idx));
    }
    let mut basis = eigvecs.clone();
    for (mut col, &d) in basis.axis_iter_mut(Axis(1)).zip(eigvals.iter()) {
        col.mapv_inplace(|v| v / d.sqrt());
    }
    Ok(NystromMap {
        kernel: spec,
        landmarks: landmarks.to_owned(),
        eigvecs,
        eigvals,
        basis,
        rank_tol,
    })
}

/// Fitted random Fourier feature map.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FourierMap {
    /// Frequency matrix Ω, M×D, rows i.i.d. N(0, 2σ I_D).
    frequencies: Array2<f64>,
    /// Phases b ∈ [−π, π]^M.
    phases: Array1<f64>,
    /// sqrt(2/M).
    scale: f64,
}

impl FourierMap {
    pub fn frequencies(&self) -> ArrayView2<'_, f64> {
        self.frequencies.view()
    }

    pub fn phases(&self) -> &Array1<f64> {
        &self.phases
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Number of features M.
    pub fn n_features(&self) -> usize {
        self.frequencies.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.frequencies.ncols()
    }

    /// Featurize rows of `x`: entry (i, m) is `sqrt(2/M) · cos(ω_mᵀ x_i + b_m)`.
    pub fn apply(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.frequencies.ncols() {
            return Err(Error::DimensionMismatch(
                x.ncols(),
                self.frequencies.ncols(),
            ));
        }
        let mut z = x.dot(&self.frequencies.t());
        for mut row in z.rows_mut() {
            row += &self.phases;
        }
        z.mapv_inplace(|v| self.scale * v.cos());
        Ok(z)
    }

    /// Split into two disjoint maps of `m` features each (first m and last m).
    ///
    /// Requires exactly 2m features; both halves keep the scale sqrt(2/m).
    pub fn split_pair(&self, m: usize) -> Result<(FourierMap, FourierMap)> {
        if self.n_features() != 2 * m {
            return Err(Error::DimensionMismatch(self.n_features(), 2 * m));
        }
        let scale = (2.0 / m as f64).sqrt();
        let first = FourierMap {
            frequencies: self.frequencies.slice(ndarray::s![..m, ..]).to_owned(),
            phases: self.phases.slice(ndarray::s![..m]).to_owned(),
            scale,
        };
        let second = FourierMap {
            frequencies: self.frequencies.slice(ndarray::s![m.., ..]).to_owned(),
            phases: self.phases.slice(ndarray::s![m..]).to_owned(),
            scale,
        };
        Ok((first, second))
    }
}

/// Draw a Fourier map for the Gaussian kernel: Ω rows i.i.d. `N(0, 2σ I_D)`,
/// phases i.i.d. `Unif[−π, π]`. Deterministic given the RNG state.
pub fn fit_fourier<R: Rng>(
    spec: KernelSpec,
    m: usize,
    d: usize,
    rng: &mut R,
) -> Result<FourierMap> {
    if m == 0 {
        return Err(Error::invalid_param("m", "must be at least 1"));
    }
    if d == 0 {
        return Err(Error::invalid_param("d", "must be at least 1"));
    }
    let freq_std = (2.0 * spec.sigma()).sqrt();
    let normal = Normal::new(0.0, freq_std).expect("finite std");
    let uniform = Uniform::new_inclusive(-std::f64::consts::PI, std::f64::consts::PI)
        .expect("valid range");
    let frequencies = Array2::from_shape_fn((m, d), |_| normal.sample(rng));
    let phases = Array1::from_shape_fn(m, |_| uniform.sample(rng));
    Ok(FourierMap {
        frequencies,
        phases,
        scale: (2.0 / m as f64).sqrt(),
    })
}

/// Either kind of random feature view.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum FeatureMap {
    Nystrom(NystromMap),
    Fourier(FourierMap),
}

impl FeatureMap {
    pub fn apply(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        match self {
            FeatureMap::Nystrom(map) => map.apply(x),
            FeatureMap::Fourier(map) => map.apply(x),
        }
    }

    /// Output feature dimension.
    pub fn dim(&self) -> usize {
        match self {
            FeatureMap::Nystrom(map) => map.rank(),
            FeatureMap::Fourier(map) => map.n_features(),
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            FeatureMap::Nystrom(map) => map.input_dim(),
            FeatureMap::Fourier(map) => map.input_dim(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn rng(seed: u64) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(seed)
    }

    fn random_points(n: usize, d: usize, seed: u64) -> Array2<f64> {
        let mut r = rng(seed);
        Array2::from_shape_fn((n, d), |_| r.random_range(-1.0..1.0))
    }

    #[test]
    fn landmark_pair_exhaustive_small_case() {
        for seed in 0..20 {
            let (v1, v2) = sample_landmark_pair(4, 2, &mut rng(seed)).unwrap();
            let mut all: Vec<usize> = v1.iter().chain(v2.iter()).copied().collect();
            all.sort_unstable();
            assert_eq!(all, vec![0, 1, 2, 3]);
            assert_eq!(v1.len(), 2);
            assert_eq!(v2.len(), 2);
        }
    }

    #[test]
    fn landmark_pair_deterministic() {
        let a = sample_landmark_pair(100, 10, &mut rng(42)).unwrap();
        let b = sample_landmark_pair(100, 10, &mut rng(42)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn landmark_pair_infeasible() {
        assert!(sample_landmark_pair(5, 3, &mut rng(0)).is_err());
    }

    #[test]
    fn landmark_pair_uniform_frequency() {
        // Over 10,000 draws with N=100, M=10, each index lands in view 1
        // with frequency 0.10 ± 0.01.
        let mut counts = vec![0usize; 100];
        let mut r = rng(7);
        let draws = 10_000;
        for _ in 0..draws {
            let (v1, _) = sample_landmark_pair(100, 10, &mut r).unwrap();
            for i in v1 {
                counts[i] += 1;
            }
        }
        for (i, c) in counts.iter().enumerate() {
            let freq = *c as f64 / draws as f64;
            assert!(
                (freq - 0.10).abs() <= 0.01,
                "index {i} appeared with frequency {freq}"
            );
        }
    }

    #[test]
    fn nystrom_single_landmark() {
        let spec = KernelSpec::new(1.0).unwrap();
        let landmarks = array![[0.5, -0.5]];
        let map = fit_nystrom(spec, landmarks.view(), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(map.rank(), 1);
        assert_abs_diff_eq!(map.eigvals()[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(map.eigvecs()[[0, 0]].abs(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn nystrom_duplicate_landmarks_truncate_rank() {
        // K̂ = [[1, 1], [1, 1]] has eigenvalues {2, 0}; only one is retained.
        let spec = KernelSpec::new(1.0).unwrap();
        let landmarks = array![[0.3, 0.7], [0.3, 0.7]];
        let map = fit_nystrom(spec, landmarks.view(), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(map.rank(), 1);
        assert_abs_diff_eq!(map.eigvals()[0], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn nystrom_rejects_invalid_rank_tol() {
        let spec = KernelSpec::new(1.0).unwrap();
        let landmarks = array![[0.0]];
        assert!(fit_nystrom(spec, landmarks.view(), 0.0).is_err());
        assert!(fit_nystrom(spec, landmarks.view(), 1.0).is_err());
    }

    #[test]
    fn nystrom_eigvecs_orthonormal() {
        let spec = KernelSpec::new(0.8).unwrap();
        let landmarks = random_points(12, 3, 5);
        let map = fit_nystrom(spec, landmarks.view(), DEFAULT_RANK_TOL).unwrap();
        let v = map.eigvecs();
        let vtv = v.t().dot(&v);
        for i in 0..map.rank() {
            for j in 0..map.rank() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(vtv[[i, j]], expect, epsilon = 1e-8);
            }
        }
        // eigenvalues descending
        for w in map.eigvals().windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn nystrom_recovers_landmark_gram_at_full_rank() {
        let spec = KernelSpec::new(0.6).unwrap();
        let landmarks = random_points(10, 2, 9);
        let map = fit_nystrom(spec, landmarks.view(), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(map.rank(), 10, "random landmarks should be full rank");
        let z = map.apply(landmarks.view()).unwrap();
        let zzt = z.dot(&z.t());
        let k = spec.gram_self(landmarks.view());
        for i in 0..10 {
            for j in 0..10 {
                assert_abs_diff_eq!(zzt[[i, j]], k[[i, j]], epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn nystrom_exact_when_landmarks_cover_dataset() {
        let spec = KernelSpec::new(0.5).unwrap();
        let x = random_points(30, 3, 13);
        let map = fit_nystrom(spec, x.view(), DEFAULT_RANK_TOL).unwrap();
        let z = map.apply(x.view()).unwrap();
        let zzt = z.dot(&z.t());
        let k = spec.gram_self(x.view());
        let diff = (&zzt - &k).mapv(|v| v * v).sum().sqrt();
        let norm = k.mapv(|v| v * v).sum().sqrt();
        assert!(diff / norm <= 1e-8, "relative error {}", diff / norm);
    }

    #[test]
    fn nystrom_apply_dimension_mismatch() {
        let spec = KernelSpec::new(1.0).unwrap();
        let landmarks = random_points(4, 3, 1);
        let map = fit_nystrom(spec, landmarks.view(), DEFAULT_RANK_TOL).unwrap();
        let bad = random_points(5, 2, 2);
        assert!(map.apply(bad.view()).is_err());
    }

    #[test]
    fn fourier_deterministic() {
        let spec = KernelSpec::new(0.5).unwrap();
        let a = fit_fourier(spec, 16, 3, &mut rng(3)).unwrap();
        let b = fit_fourier(spec, 16, 3, &mut rng(3)).unwrap();
        assert_eq!(a.frequencies(), b.frequencies());
        assert_eq!(a.phases(), b.phases());
    }

    #[test]
    fn fourier_frequency_moments() {
        // σ=0.5 means frequency variance 2σ = 1.
        let spec = KernelSpec::new(0.5).unwrap();
        let map = fit_fourier(spec, 100_000, 1, &mut rng(17)).unwrap();
        let mean = map.frequencies().mean().unwrap();
        assert!(mean.abs() <= 0.02, "sample mean {mean}");
        let var = map.frequencies().mapv(|v| (v - mean) * (v - mean)).mean().unwrap();
        assert!((var - 1.0).abs() <= 0.03, "sample variance {var}");
    }

    #[test]
    fn fourier_entries_within_cosine_range() {
        let spec = KernelSpec::new(1.0).unwrap();
        let map = fit_fourier(spec, 64, 2, &mut rng(23)).unwrap();
        let x = random_points(50, 2, 29);
        let z = map.apply(x.view()).unwrap();
        let bound = (2.0 / 64.0f64).sqrt();
        for v in z.iter() {
            assert!(v.abs() <= bound + 1e-15);
        }
    }

    #[test]
    fn fourier_inner_product_estimates_kernel() {
        let spec = KernelSpec::new(1.0).unwrap();
        let m = 50_000;
        let map = fit_fourier(spec, m, 2, &mut rng(31)).unwrap();
        let x = array![[0.2, 0.4], [0.2 + (0.5f64).sqrt(), 0.4 + (0.5f64).sqrt()]];
        // ‖x−x'‖² = 1, so κ = e⁻¹.
        let z = map.apply(x.view()).unwrap();
        let est: f64 = z.row(0).dot(&z.row(1));
        assert!(
            (est - (-1.0f64).exp()).abs() <= 0.02,
            "estimate {est} vs {}",
            (-1.0f64).exp()
        );
        // self inner product approximates κ(x, x) = 1 within 3/sqrt(M)
        let self_est: f64 = z.row(0).dot(&z.row(0));
        assert!((self_est - 1.0).abs() <= 3.0 / (m as f64).sqrt());
    }

    #[test]
    fn fourier_split_pair_disjoint() {
        let spec = KernelSpec::new(1.0).unwrap();
        let both = fit_fourier(spec, 20, 2, &mut rng(37)).unwrap();
        let (a, b) = both.split_pair(10).unwrap();
        assert_eq!(a.n_features(), 10);
        assert_eq!(b.n_features(), 10);
        assert_eq!(a.frequencies(), both.frequencies().slice(ndarray::s![..10, ..]));
        assert_eq!(b.frequencies(), both.frequencies().slice(ndarray::s![10.., ..]));
        assert_abs_diff_eq!(a.scale(), (2.0f64 / 10.0).sqrt(), epsilon = 1e-15);
    }
}
