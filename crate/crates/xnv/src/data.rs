//! Dataset ingestion, standardization, splitting, and synthetic generation.

use std::fmt;
use std::path::Path;

use ndarray::{Array1, Array2, ArrayView2};
use rand::prelude::*;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;

/// Prediction task kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Task {
    Regression,
    Classification,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Task::Regression => write!(f, "regression"),
            Task::Classification => write!(f, "classification"),
        }
    }
}

impl std::str::FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "r" | "regression" => Ok(Task::Regression),
            "c" | "classification" => Ok(Task::Classification),
            other => Err(Error::invalid_param(
                "task",
                format!("expected `r` or `c`, got `{other}`"),
            )),
        }
    }
}

/// A loaded dataset: features, targets, task kind.
///
/// Classification labels are stored as {−1, +1}; all values are finite.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub x: Array2<f64>,
    pub y: Array1<f64>,
    pub task: Task,
    pub name: String,
}

impl Dataset {
    pub fn n_rows(&self) -> usize {
        self.x.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.x.ncols()
    }
}

/// How to interpret a CSV file.
#[derive(Debug, Clone)]
pub struct CsvSchema {
    /// Zero-based label column; `None` means the last column.
    pub label_column: Option<usize>,
    pub task: Task,
    pub delimiter: u8,
    pub has_header: bool,
}

impl CsvSchema {
    pub fn new(task: Task) -> Self {
        CsvSchema {
            label_column: None,
            task,
            delimiter: b',',
            has_header: false,
        }
    }
}

/// Load a numeric CSV.
///
/// Every cell must parse as a finite number; failures report the 1-based row
/// and column. Classification labels may be {0, 1} (mapped to {−1, +1}) or
/// already {−1, +1}.
pub fn load_csv(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<Dataset> {
    let name = path
        .as_ref()
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(schema.has_header)
        .delimiter(schema.delimiter)
        .flexible(false)
        .from_path(path.as_ref())?;

    let header_rows = usize::from(schema.has_header);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (rec_idx, record) in reader.records().enumerate() {
        let record = record?;
        let mut row = Vec::with_capacity(record.len());
        for (col_idx, cell) in record.iter().enumerate() {
            let trimmed = cell.trim();
            if trimmed.is_empty() {
                return Err(Error::CsvCell {
                    row: rec_idx + header_rows + 1,
                    col: col_idx + 1,
                    reason: "missing value".into(),
                });
            }
            let value: f64 = trimmed.parse().map_err(|_| Error::CsvCell {
                row: rec_idx + header_rows + 1,
                col: col_idx + 1,
                reason: format!("`{trimmed}` is not numeric"),
            })?;
            if !value.is_finite() {
                return Err(Error::CsvCell {
                    row: rec_idx + header_rows + 1,
                    col: col_idx + 1,
                    reason: "non-finite value".into(),
                });
            }
            row.push(value);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Degenerate("CSV file contains no data rows".into()));
    }

    let width = rows[0].len();
    if width < 2 {
        return Err(Error::Degenerate(
            "CSV needs at least one feature column and one label column".into(),
        ));
    }
    let label_col = schema.label_column.unwrap_or(width - 1);
    if label_col >= width {
        return Err(Error::invalid_param(
            "label_column",
            format!("index {label_col} out of range for {width} columns"),
        ));
    }

    let n = rows.len();
    let d = width - 1;
    let mut x = Array2::zeros((n, d));
    let mut y = Array1::zeros(n);
    for (i, row) in rows.iter().enumerate() {
        let mut out_col = 0;
        for (j, &v) in row.iter().enumerate() {
            if j == label_col {
                y[i] = v;
            } else {
                x[[i, out_col]] = v;
                out_col += 1;
            }
        }
    }

    if schema.task == Task::Classification {
        let zero_one = y.iter().all(|&v| v == 0.0 || v == 1.0);
        let pm_one = y.iter().all(|&v| v == -1.0 || v == 1.0);
        if zero_one {
            y.mapv_inplace(|v| if v == 0.0 { -1.0 } else { 1.0 });
        } else if !pm_one {
            let bad = y.iter().find(|&&v| v != -1.0 && v != 1.0).unwrap();
            return Err(Error::invalid_param(
                "labels",
                format!("classification labels must be {{0,1}} or {{−1,+1}}, found {bad}"),
            ));
        }
    }

    Ok(Dataset {
        x,
        y,
        task: schema.task,
        name,
    })
}

/// Write a dataset as numeric CSV (label in the last column) with full
/// round-trip precision, so write-then-load reproduces values exactly.
pub fn save_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().from_path(path.as_ref())?;
    for i in 0..dataset.n_rows() {
        let mut record: Vec<String> = dataset.x.row(i).iter().map(|v| format!("{v}")).collect();
        record.push(format!("{}", dataset.y[i]));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Per-column z-scoring parameters.
///
/// Zero-variance columns are flagged and mapped to 0 rather than divided by
/// their (zero) standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizationParams {
    pub means: Array1<f64>,
    /// Population standard deviations; 0 marks a flagged constant column.
    pub stds: Array1<f64>,
    pub zero_variance: Vec<bool>,
}

impl StandardizationParams {
    /// Estimate parameters from the given rows.
    pub fn fit(x: ArrayView2<'_, f64>, stats_from: &[usize]) -> Result<Self> {
        if stats_from.is_empty() {
            return Err(Error::invalid_param("stats_from", "must be nonempty"));
        }
        if let Some(&bad) = stats_from.iter().find(|&&i| i >= x.nrows()) {
            return Err(Error::invalid_param(
                "stats_from",
                format!("row {bad} out of range for {} rows", x.nrows()),
            ));
        }
        let d = x.ncols();
        let m = stats_from.len() as f64;
        let mut means = Array1::zeros(d);
        let mut stds = Array1::zeros(d);
        for j in 0..d {
            let mut sum = 0.0;
            for &i in stats_from {
                sum += x[[i, j]];
            }
            means[j] = sum / m;
            let mut sq = 0.0;
            for &i in stats_from {
                let v = x[[i, j]] - means[j];
                sq += v * v;
            }
            stds[j] = (sq / m).sqrt();
        }
        // A column is constant when its spread is at rounding level relative
        // to its magnitude.
        let zero_variance: Vec<bool> = (0..d)
            .map(|j| stds[j] <= 1e-12 * (1.0 + means[j].abs()))
            .collect();
        for (j, &flag) in zero_variance.iter().enumerate() {
            if flag {
                stds[j] = 0.0;
            }
        }
        Ok(StandardizationParams {
            means,
            stds,
            zero_variance,
        })
    }

    /// Apply the stored transform to rows of `x`.
    pub fn apply(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.means.len() {
            return Err(Error::DimensionMismatch(x.ncols(), self.means.len()));
        }
        let mut out = x.to_owned();
        for j in 0..self.means.len() {
            if self.zero_variance[j] {
                out.column_mut(j).fill(0.0);
            } else {
                let (m, s) = (self.means[j], self.stds[j]);
                out.column_mut(j).mapv_inplace(|v| (v - m) / s);
            }
        }
        Ok(out)
    }

    /// Persist as a small key-value text file.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = String::new();
        for j in 0..self.means.len() {
            text.push_str(&format!("col{j}.mean = {}\n", self.means[j]));
            text.push_str(&format!("col{j}.std = {}\n", self.stds[j]));
            text.push_str(&format!("col{j}.zero_variance = {}\n", self.zero_variance[j]));
        }
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut means = Vec::new();
        let mut stds = Vec::new();
        let mut zero_variance = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::invalid_param("standardization file", format!("malformed line `{line}`"))
            })?;
            let (key, value) = (key.trim(), value.trim());
            if key.ends_with(".mean") {
                means.push(value.parse::<f64>().map_err(|e| {
                    Error::invalid_param("standardization file", format!("{key}: {e}"))
                })?);
            } else if key.ends_with(".std") {
                stds.push(value.parse::<f64>().map_err(|e| {
                    Error::invalid_param("standardization file", format!("{key}: {e}"))
                })?);
            } else if key.ends_with(".zero_variance") {
                zero_variance.push(value.parse::<bool>().map_err(|e| {
                    Error::invalid_param("standardization file", format!("{key}: {e}"))
                })?);
            }
        }
        if means.len() != stds.len() || means.len() != zero_variance.len() {
            return Err(Error::invalid_param(
                "standardization file",
                "inconsistent column counts",
            ));
        }
        Ok(StandardizationParams {
            means: Array1::from(means),
            stds: Array1::from(stds),
            zero_variance,
        })
    }
}

/// Standardize a dataset using statistics from `stats_from` rows, returning
/// the transformed dataset and the fitted parameters.
pub fn standardize(
    dataset: &Dataset,
    stats_from: &[usize],
) -> Result<(Dataset, StandardizationParams)> {
    let params = StandardizationParams::fit(dataset.x.view(), stats_from)?;
    let x = params.apply(dataset.x.view())?;
    Ok((
        Dataset {
            x,
            y: dataset.y.clone(),
            task: dataset.task,
            name: dataset.name.clone(),
        },
        params,
    ))
}

/// Disjoint labeled / unlabeled / test row assignment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub labeled: Vec<usize>,
    pub unlabeled: Vec<usize>,
    pub test: Vec<usize>,
    pub seed: u64,
}

impl SplitPlan {
    /// Training pool: labeled followed by unlabeled indices.
    pub fn pool(&self) -> Vec<usize> {
        let mut pool = self.labeled.clone();
        pool.extend_from_slice(&self.unlabeled);
        pool
    }
}

/// Uniformly split `n_total` rows into test (a `test_fraction` share),
/// `n_labeled` labeled rows, and the remaining unlabeled pool.
///
/// Deterministic per seed; the three sets partition the row range.
pub fn make_split(
    n_total: usize,
    n_labeled: usize,
    test_fraction: f64,
    seed: u64,
) -> Result<SplitPlan> {
    if !(0.0..1.0).contains(&test_fraction) {
        return Err(Error::invalid_param(
            "test_fraction",
            format!("must lie in [0, 1), got {test_fraction}"),
        ));
    }
    let n_test = (n_total as f64 * test_fraction).round() as usize;
    let pool = n_total.saturating_sub(n_test);
    if n_labeled == 0 || n_labeled > pool {
        return Err(Error::Infeasible(format!(
            "cannot label {n_labeled} of a {pool}-row training pool \
             (N = {n_total}, test fraction {test_fraction})"
        )));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let perm = rand::seq::index::sample(&mut rng, n_total, n_total).into_vec();
    let mut test = perm[..n_test].to_vec();
    let mut labeled = perm[n_test..n_test + n_labeled].to_vec();
    let mut unlabeled = perm[n_test + n_labeled..].to_vec();
    test.sort_unstable();
    labeled.sort_unstable();
    unlabeled.sort_unstable();
    Ok(SplitPlan {
        labeled,
        unlabeled,
        test,
        seed,
    })
}

/// A synthetic regression dataset with its noiseless targets.
#[derive(Debug, Clone)]
pub struct SynthDataset {
    pub dataset: Dataset,
    /// Targets before noise, for oracle error measurement.
    pub y_clean: Array1<f64>,
}

/// Generate a dataset whose target lives in the kernel's function space:
/// `X ~ Unif[−1,1]^D` and `yᵢ = Σₖ cₖ κ(xᵢ, uₖ) + noise`, with centers `uₖ`
/// and coefficients `cₖ ~ N(0, 1)` drawn once per seed.
pub fn synth_rkhs(
    spec: KernelSpec,
    n: usize,
    d: usize,
    k_centers: usize,
    noise_std: f64,
    seed: u64,
) -> Result<SynthDataset> {
    if n == 0 || d == 0 {
        return Err(Error::invalid_param("n/d", "must be at least 1"));
    }
    if k_centers == 0 {
        return Err(Error::invalid_param("k_centers", "must be at least 1"));
    }
    if noise_std < 0.0 || !noise_std.is_finite() {
        return Err(Error::invalid_param("noise_std", "must be finite and ≥ 0"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let centers = Array2::from_shape_fn((k_centers, d), |_| rng.random_range(-1.0..1.0));
    let coeffs = Array1::from_shape_fn(k_centers, |_| rng.sample::<f64, _>(StandardNormal));
    let x = Array2::from_shape_fn((n, d), |_| rng.random_range(-1.0..1.0));
    let k_matrix = spec.gram(x.view(), centers.view())?;
    let y_clean = k_matrix.dot(&coeffs);
    let y = if noise_std > 0.0 {
        &y_clean + &Array1::from_shape_fn(n, |_| noise_std * rng.sample::<f64, _>(StandardNormal))
    } else {
        y_clean.clone()
    };
    Ok(SynthDataset {
        dataset: Dataset {
            x,
            y,
            task: Task::Regression,
            name: "synth_rkhs".into(),
        },
        y_clean,
    })
}
