//! Independent numerical oracles for the integration tests.
//!
//! Everything here is deliberately self-contained: the eigensolver is a
//! classical cyclic Jacobi iteration, inverses come from it, and the
//! optimizer is plain gradient descent. None of it shares code with the
//! library's LAPACK-backed paths, so agreement between the two is evidence,
//! not tautology.

#![allow(dead_code)]

use ndarray::{Array1, Array2, ArrayView2};

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Returns eigenvalues ascending with matching eigenvector columns.
pub fn jacobi_eigh(a: &Array2<f64>) -> (Array1<f64>, Array2<f64>) {
    let n = a.nrows();
    assert_eq!(a.ncols(), n, "matrix must be square");
    let mut m = a.clone();
    let mut v: Array2<f64> = Array2::eye(n);
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);

    for _sweep in 0..200 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[[p, q]] * m[[p, q]];
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (m[[q, q]] - m[[p, p]]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    1.0 / (theta - (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = c * mkp - s * mkq;
                    m[[k, q]] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = c * mpk - s * mqk;
                    m[[q, k]] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[i, i]].partial_cmp(&m[[j, j]]).unwrap());
    let mut vals = Array1::zeros(n);
    let mut vecs = Array2::zeros((n, n));
    for (out, &idx) in order.iter().enumerate() {
        vals[out] = m[[idx, idx]];
        vecs.column_mut(out).assign(&v.column(idx));
    }
    (vals, vecs)
}

/// Moore–Penrose pseudo-inverse of a symmetric PSD matrix via Jacobi.
///
/// Eigenvalues at or below `tol · λ_max` are treated as zero.
pub fn pinv_psd(a: &Array2<f64>, tol: f64) -> Array2<f64> {
    let (vals, vecs) = jacobi_eigh(a);
    let lambda_max = vals.iter().cloned().fold(0.0f64, f64::max);
    let n = a.nrows();
    let mut out = Array2::zeros((n, n));
    for j in 0..n {
        if vals[j] > tol * lambda_max && vals[j] > 0.0 {
            let inv = 1.0 / vals[j];
            let col = vecs.column(j);
            for r in 0..n {
                for c in 0..n {
                    out[[r, c]] += inv * col[r] * col[c];
                }
            }
        }
    }
    out
}

/// Symmetric inverse square root of a positive definite matrix via Jacobi.
pub fn inv_sqrt_psd(a: &Array2<f64>) -> Array2<f64> {
    let (vals, vecs) = jacobi_eigh(a);
    let n = a.nrows();
    let mut out = Array2::zeros((n, n));
    for j in 0..n {
        assert!(vals[j] > 0.0, "matrix not positive definite: eigenvalue {}", vals[j]);
        let inv = vals[j].sqrt().recip();
        let col = vecs.column(j);
        for r in 0..n {
            for c in 0..n {
                out[[r, c]] += inv * col[r] * col[c];
            }
        }
    }
    out
}

/// Inverse of a small well-conditioned matrix by Gauss–Jordan elimination.
pub fn gauss_jordan_inv(a: &Array2<f64>) -> Array2<f64> {
    let n = a.nrows();
    assert_eq!(a.ncols(), n);
    let mut m = a.clone();
    let mut inv: Array2<f64> = Array2::eye(n);
    for col in 0..n {
        let mut pivot = col;
        for r in (col + 1)..n {
            if m[[r, col]].abs() > m[[pivot, col]].abs() {
                pivot = r;
            }
        }
        assert!(m[[pivot, col]].abs() > 1e-300, "singular matrix");
        if pivot != col {
            for c in 0..n {
                m.swap([pivot, c], [col, c]);
                inv.swap([pivot, c], [col, c]);
            }
        }
        let scale = m[[col, col]];
        for c in 0..n {
            m[[col, c]] /= scale;
            inv[[col, c]] /= scale;
        }
        for r in 0..n {
            if r != col {
                let factor = m[[r, col]];
                for c in 0..n {
                    m[[r, c]] -= factor * m[[col, c]];
                    inv[[r, c]] -= factor * inv[[col, c]];
                }
            }
        }
    }
    inv
}

/// Minimize the canonical ridge objective by gradient descent:
///
///   f(β) = (1/n)‖y − Z̄β‖² + Σⱼ ((1−λⱼ)/λⱼ) βⱼ² + γ‖β‖².
///
/// The step size comes from the extreme eigenvalues of the (convex,
/// quadratic) objective's Hessian, computed with the Jacobi solver above.
pub fn minimize_canonical_objective(
    zbar: ArrayView2<'_, f64>,
    y: &Array1<f64>,
    lambda: &Array1<f64>,
    gamma: f64,
    iterations: usize,
) -> Array1<f64> {
    let n = zbar.nrows() as f64;
    let p = zbar.ncols();
    let ztz = zbar.t().dot(&zbar) / n;
    let zty = zbar.t().dot(y) / n;
    let mut hessian_half = ztz.clone();
    for j in 0..p {
        hessian_half[[j, j]] += (1.0 - lambda[j]) / lambda[j] + gamma;
    }
    let (hvals, _) = jacobi_eigh(&hessian_half);
    let l_max = hvals[p - 1];
    let l_min = hvals[0].max(0.0);
    let step = 2.0 / (2.0 * (l_max + l_min));

    let mut beta = Array1::zeros(p);
    for _ in 0..iterations {
        // ∇f/2 = (ZᵀZ/n + Λ + γI)β − Zᵀy/n
        let grad_half = hessian_half.dot(&beta) - &zty;
        let grad_norm = grad_half.dot(&grad_half).sqrt();
        if grad_norm < 1e-14 {
            break;
        }
        beta = &beta - &grad_half.mapv(|g| 2.0 * step * g);
    }
    beta
}

/// An n×p matrix with exactly orthonormal columns under the (1/n) inner
/// product, built by two rounds of modified Gram–Schmidt.
pub fn orthonormal_features(n: usize, p: usize, seed: u64) -> Array2<f64> {
    use rand::prelude::*;
    use rand_chacha::ChaCha20Rng;
    assert!(n >= p);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut z = Array2::from_shape_fn((n, p), |_| rng.random_range(-1.0f64..1.0));
    for _round in 0..2 {
        for j in 0..p {
            for k in 0..j {
                let proj = {
                    let cj = z.column(j);
                    let ck = z.column(k);
                    cj.dot(&ck)
                };
                let ck = z.column(k).to_owned();
                z.column_mut(j).zip_mut_with(&ck, |a, b| *a -= proj * b);
            }
            let norm = z.column(j).dot(&z.column(j)).sqrt();
            assert!(norm > 1e-12, "degenerate random matrix");
            z.column_mut(j).mapv_inplace(|v| v / norm);
        }
    }
    // columns have unit Euclidean norm; rescale so (1/n) Z̄ᵀZ̄ = I.
    z.mapv_inplace(|v| v * (n as f64).sqrt());
    z
}

/// Relative Frobenius distance between two matrices.
pub fn rel_frobenius(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    let diff = (a - b).mapv(|v| v * v).sum().sqrt();
    let norm = b.mapv(|v| v * v).sum().sqrt().max(1e-300);
    diff / norm
}

/// Maximum absolute entry difference.
pub fn max_abs_diff(a: &Array1<f64>, b: &Array1<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
