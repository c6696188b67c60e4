//! Experiment execution: per-cell fitting, result tables, and emission.

use std::path::Path;
use std::time::Instant;

use ndarray::{Array1, ArrayView1, ArrayView2};
use rand::prelude::*;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::cca::CcaRegularization;
use crate::data::{
    load_csv, make_split, standardize, synth_rkhs, CsvSchema, Dataset, StandardizationParams,
    Task,
};
use crate::error::{Error, Result};
use crate::estimators::{fit_krr, fit_ridge, fit_sssl_exact, fit_sssl_m};
use crate::features::{fit_fourier, fit_nystrom, DEFAULT_RANK_TOL};
use crate::kernels::KernelSpec;
use crate::pipeline::{fit_xks, fit_xnv};
use crate::util::{select_entries, select_rows};

use super::{derive_rng, evaluate, DataSource, ExperimentConfig, Method, StreamPurpose};

/// One (method, n, seed) record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultRow {
    pub dataset: String,
    pub method: Method,
    pub n: usize,
    pub seed: usize,
    /// Metric value, absent when the cell failed.
    pub metric: Option<f64>,
    /// Failure description, present exactly when `metric` is absent.
    pub error: Option<String>,
    /// Wall-clock fit+predict seconds (kept out of the raw-row CSV so that
    /// reruns are byte-identical).
    pub seconds: f64,
}

/// Mean/std summary of one (method, n) cell across seeds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AggregateRow {
    pub dataset: String,
    pub method: Method,
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation across seeds (0 when fewer than 2 succeeded).
    pub std: f64,
    pub seeds_ok: usize,
    pub seeds_failed: usize,
}

/// Hyperparameters selected by cross validation for one method.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectedParams {
    pub method: Method,
    pub sigma: f64,
    pub gamma: f64,
}

/// Per-(method, n, seed) error records plus aggregates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
    pub aggregates: Vec<AggregateRow>,
    pub selected: Vec<SelectedParams>,
}

impl ResultTable {
    /// Raw rows as CSV. Deterministic: excludes wall-clock timings.
    pub fn rows_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["dataset", "method", "n", "seed", "metric", "status", "error"])
            .expect("in-memory write");
        for r in &self.rows {
            let metric = r.metric.map(|m| format!("{m}")).unwrap_or_default();
            let status = if r.metric.is_some() { "ok" } else { "failed" };
            let error = r.error.clone().unwrap_or_default();
            w.write_record([
                r.dataset.as_str(),
                r.method.name(),
                &r.n.to_string(),
                &r.seed.to_string(),
                &metric,
                status,
                &error,
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flushed")).expect("utf-8")
    }

    /// Wall-clock timings as CSV (separate file: not reproducible byte-wise).
    pub fn timings_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["dataset", "method", "n", "seed", "seconds"])
            .expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                r.dataset.as_str(),
                r.method.name(),
                &r.n.to_string(),
                &r.seed.to_string(),
                &format!("{}", r.seconds),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flushed")).expect("utf-8")
    }

    /// Aggregates as CSV, one row per (method, n), with effective seed counts.
    pub fn aggregates_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "dataset",
            "method",
            "n",
            "mean",
            "std",
            "seeds_ok",
            "seeds_failed",
        ])
        .expect("in-memory write");
        for a in &self.aggregates {
            w.write_record([
                a.dataset.as_str(),
                a.method.name(),
                &a.n.to_string(),
                &format!("{}", a.mean),
                &format!("{}", a.std),
                &a.seeds_ok.to_string(),
                &a.seeds_failed.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flushed")).expect("utf-8")
    }
}

/// Load or generate the configured dataset.
pub(crate) fn load_source(config: &ExperimentConfig) -> Result<Dataset> {
    match &config.source {
        DataSource::Csv(path) => load_csv(path, &CsvSchema::new(config.task)),
        DataSource::Synth(spec) => {
            if config.task == Task::Classification {
                return Err(Error::invalid_param(
                    "task",
                    "the synthetic generator produces regression targets; \
                     use --data for classification",
                ));
            }
            let kernel = KernelSpec::new(spec.sigma)?;
            Ok(synth_rkhs(kernel, spec.n, spec.d, spec.k_centers, spec.noise_std, spec.seed)?
                .dataset)
        }
    }
}

/// Number of eigenfunctions used by SSSL_EXACT inside the harness: matched to
/// the feature count M of the Nyström approximation it is compared against.
fn sssl_exact_s(m: usize, n_pool: usize) -> usize {
    m.min(n_pool)
}

/// Fit one method and predict on the test rows.
///
/// `x_pool` holds labeled rows first (0..n_labeled) followed by the unlabeled
/// pool; `x_test` is disjoint from both.
#[allow(clippy::too_many_arguments)]
pub(crate) fn fit_and_predict(
    method: Method,
    task: Task,
    x_pool: ArrayView2<'_, f64>,
    n_labeled: usize,
    y_labeled: ArrayView1<'_, f64>,
    x_test: ArrayView2<'_, f64>,
    sigma: f64,
    gamma: f64,
    m: usize,
    rng: &mut ChaCha20Rng,
) -> Result<Array1<f64>> {
    let spec = KernelSpec::new(sigma)?;
    let labeled: Vec<usize> = (0..n_labeled).collect();
    let x_labeled = x_pool.slice(ndarray::s![..n_labeled, ..]);
    match method {
        Method::Xnv => {
            let p = fit_xnv(
                spec,
                x_pool,
                &labeled,
                y_labeled,
                m,
                gamma,
                CcaRegularization::default(),
                rng,
                task,
            )?;
            p.predict(x_test)
        }
        Method::Xks => {
            let p = fit_xks(
                spec,
                x_pool,
                &labeled,
                y_labeled,
                m,
                gamma,
                CcaRegularization::default(),
                rng,
                task,
            )?;
            p.predict(x_test)
        }
        Method::SsslM | Method::Sssl2M => {
            let landmarks = if method == Method::SsslM { m } else { 2 * m };
            let model = fit_sssl_m(
                spec,
                x_pool,
                &labeled,
                y_labeled,
                landmarks.min(x_pool.nrows()),
                gamma,
                rng,
                true,
            )?;
            model.predict(x_test)
        }
        Method::SsslExact => {
            let s = sssl_exact_s(m, x_pool.nrows());
            let model = fit_sssl_exact(spec, x_pool, &labeled, y_labeled, s, true)?;
            model.predict(x_test)
        }
        Method::Krr => {
            let model = fit_krr(spec, x_labeled, y_labeled, gamma, true)?;
            model.predict(x_test)
        }
        Method::RffM | Method::Rff2M => {
            let count = if method == Method::RffM { m } else { 2 * m };
            let map = fit_fourier(spec, count, x_pool.ncols(), rng)?;
            let z = map.apply(x_labeled)?;
            let ridge = fit_ridge(z.view(), y_labeled, gamma, true)?;
            ridge.predict(map.apply(x_test)?.view())
        }
        Method::NyRidgeM => {
            // Fully supervised counterpart of SSSL_M: landmarks drawn from
            // the labeled rows only.
            let count = m.min(n_labeled);
            let picks = rand::seq::index::sample(rng, n_labeled, count).into_vec();
            let map = fit_nystrom(spec, select_rows(x_labeled, &picks).view(), DEFAULT_RANK_TOL)?;
            let z = map.apply(x_labeled)?;
            let ridge = fit_ridge(z.view(), y_labeled, gamma, true)?;
            ridge.predict(map.apply(x_test)?.view())
        }
    }
}

/// Whether the γ grid affects the method (exact SSSL has no ridge penalty).
fn gamma_relevant(method: Method) -> bool {
    method != Method::SsslExact
}

/// Select (σ, γ) for one method by k-fold cross validation on a labeled
/// subset of `cv_labeled` rows (or the whole dataset when smaller).
///
/// Ties break toward larger γ, then larger σ. Deterministic per seed.
#[allow(clippy::too_many_arguments)]
pub fn cross_validate(
    method: Method,
    dataset: &Dataset,
    sigma_grid: &[f64],
    gamma_grid: &[f64],
    folds: usize,
    cv_labeled: usize,
    m: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if sigma_grid.is_empty() || gamma_grid.is_empty() {
        return Err(Error::invalid_param("grids", "must be nonempty"));
    }
    let n_total = dataset.n_rows();
    let subset_size = cv_labeled.min(n_total);
    if folds < 2 || subset_size < folds {
        return Err(Error::Infeasible(format!(
            "cannot build {folds} folds from a {subset_size}-row CV subset"
        )));
    }

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let subset = rand::seq::index::sample(&mut rng, n_total, subset_size).into_vec();
    let params = StandardizationParams::fit(dataset.x.view(), &subset)?;
    let x_std = params.apply(dataset.x.view())?;

    // Fold assignment: the sampled order is already uniform, so round-robin
    // over it gives balanced random folds.
    let fold_of: Vec<usize> = (0..subset_size).map(|i| i % folds).collect();

    let mut best: Option<(f64, f64, f64)> = None; // (metric, sigma, gamma)
    for &gamma in gamma_grid {
        // γ is inert for methods without a ridge penalty; walk the σ axis once.
        if !gamma_relevant(method) && gamma != gamma_grid[0] {
            continue;
        }
        for &sigma in sigma_grid {
            let mut fold_metrics = Vec::with_capacity(folds);
            let mut failed = false;
            for fold in 0..folds {
                let train_rows: Vec<usize> = subset
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| fold_of[*i] != fold)
                    .map(|(_, &r)| r)
                    .collect();
                let val_rows: Vec<usize> = subset
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| fold_of[*i] == fold)
                    .map(|(_, &r)| r)
                    .collect();
                let x_train = select_rows(x_std.view(), &train_rows);
                let y_train = select_entries(dataset.y.view(), &train_rows);
                let x_val = select_rows(x_std.view(), &val_rows);
                let y_val = select_entries(dataset.y.view(), &val_rows);
                let mut fit_rng = derive_rng(
                    seed,
                    StreamPurpose::CrossValidation,
                    Some(method),
                    fold as u64,
                    0,
                );
                let outcome = fit_and_predict(
                    method,
                    dataset.task,
                    x_train.view(),
                    train_rows.len(),
                    y_train.view(),
                    x_val.view(),
                    sigma,
                    gamma,
                    m,
                    &mut fit_rng,
                )
                .and_then(|preds| evaluate(preds.view(), y_val.view(), dataset.task));
                match outcome {
                    Ok(metric) => fold_metrics.push(metric),
                    Err(_) => {
                        failed = true;
                        break;
                    }
                }
            }
            if failed {
                continue;
            }
            let mean = fold_metrics.iter().sum::<f64>() / fold_metrics.len() as f64;
            let better = match best {
                None => true,
                Some((best_metric, _, _)) => mean <= best_metric,
            };
            if better {
                best = Some((mean, sigma, gamma));
            }
        }
    }

    best.map(|(_, sigma, gamma)| (sigma, gamma)).ok_or_else(|| {
        Error::Infeasible("every (σ, γ) candidate failed during cross validation".into())
    })
}

/// Run one (method, n, seed) cell: draw the split, standardize inductively,
/// fit, and evaluate on the held-out test rows.
pub(crate) fn run_cell(
    config: &ExperimentConfig,
    dataset: &Dataset,
    method: Method,
    sigma: f64,
    gamma: f64,
    n: usize,
    seed_idx: usize,
) -> ResultRow {
    let start = Instant::now();
    let outcome = (|| -> Result<f64> {
        let split_seed = derive_rng(
            config.master_seed,
            StreamPurpose::Split,
            None,
            n as u64,
            seed_idx as u64,
        )
        .next_u64();
        let plan = make_split(dataset.n_rows(), n, config.test_fraction, split_seed)?;
        let pool = plan.pool();
        let (standardized, _) = standardize(dataset, &pool)?;

        // Pool matrix with labeled rows first, matching fit_and_predict's layout.
        let x_pool = select_rows(standardized.x.view(), &pool);
        let y_labeled = select_entries(standardized.y.view(), &plan.labeled);
        let x_test = select_rows(standardized.x.view(), &plan.test);
        let y_test = select_entries(standardized.y.view(), &plan.test);

        let mut fit_rng = derive_rng(
            config.master_seed,
            StreamPurpose::Fit,
            Some(method),
            n as u64,
            seed_idx as u64,
        );
        let preds = fit_and_predict(
            method,
            dataset.task,
            x_pool.view(),
            plan.labeled.len(),
            y_labeled.view(),
            x_test.view(),
            sigma,
            gamma,
            config.m,
            &mut fit_rng,
        )?;
        evaluate(preds.view(), y_test.view(), dataset.task)
    })();
    let seconds = start.elapsed().as_secs_f64();
    match outcome {
        Ok(metric) => ResultRow {
            dataset: dataset.name.clone(),
            method,
            n,
            seed: seed_idx,
            metric: Some(metric),
            error: None,
            seconds,
        },
        Err(e) => ResultRow {
            dataset: dataset.name.clone(),
            method,
            n,
            seed: seed_idx,
            metric: None,
            error: Some(e.to_string()),
            seconds,
        },
    }
}

/// Run the full experiment described by `config`.
///
/// Per method: cross validate once, then sweep every (n, seed) cell. Failed
/// cells are recorded with their error, never dropped, so the aggregates can
/// declare their effective seed counts.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultTable> {
    config.validate()?;
    let dataset = load_source(config)?;

    let mut selected = Vec::new();
    for &method in &config.methods {
        let cv_seed = derive_rng(
            config.master_seed,
            StreamPurpose::CrossValidation,
            Some(method),
            0,
            0,
        )
        .next_u64();
        let (sigma, gamma) = cross_validate(
            method,
            &dataset,
            &config.sigma_grid,
            &config.gamma_grid,
            config.cv_folds,
            config.cv_labeled,
            config.m,
            cv_seed,
        )?;
        selected.push(SelectedParams {
            method,
            sigma,
            gamma,
        });
    }

    let mut rows = Vec::new();
    for (mi, &method) in config.methods.iter().enumerate() {
        let SelectedParams { sigma, gamma, .. } = selected[mi];
        for &n in &config.n_grid {
            for seed_idx in 0..config.seeds {
                rows.push(run_cell(config, &dataset, method, sigma, gamma, n, seed_idx));
            }
        }
    }

    let aggregates = aggregate(&rows);
    Ok(ResultTable {
        rows,
        aggregates,
        selected,
    })
}

fn aggregate(rows: &[ResultRow]) -> Vec<AggregateRow> {
    let mut out: Vec<AggregateRow> = Vec::new();
    for row in rows {
        let existing = out
            .iter_mut()
            .find(|a| a.method == row.method && a.n == row.n && a.dataset == row.dataset);
        if existing.is_none() {
            out.push(AggregateRow {
                dataset: row.dataset.clone(),
                method: row.method,
                n: row.n,
                mean: 0.0,
                std: 0.0,
                seeds_ok: 0,
                seeds_failed: 0,
            });
        }
    }
    for agg in &mut out {
        let metrics: Vec<f64> = rows
            .iter()
            .filter(|r| r.method == agg.method && r.n == agg.n && r.dataset == agg.dataset)
            .filter_map(|r| r.metric)
            .collect();
        let failed = rows
            .iter()
            .filter(|r| {
                r.method == agg.method && r.n == agg.n && r.dataset == agg.dataset
                    && r.metric.is_none()
            })
            .count();
        agg.seeds_ok = metrics.len();
        agg.seeds_failed = failed;
        if !metrics.is_empty() {
            agg.mean = metrics.iter().sum::<f64>() / metrics.len() as f64;
            if metrics.len() >= 2 {
                let mean = agg.mean;
                let ss: f64 = metrics.iter().map(|v| (v - mean) * (v - mean)).sum();
                agg.std = (ss / (metrics.len() - 1) as f64).sqrt();
            }
        }
    }
    out
}

/// One runtime measurement: median fit seconds for a method at dataset size N.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchRow {
    pub method: Method,
    pub n_total: usize,
    pub seconds: f64,
}

/// Measure wall-clock fit time per method over a range of dataset sizes.
///
/// Each measurement is the median of `reps` (at least 3) repetitions of the
/// full fit at fixed n = 100 labeled rows, using the first σ/γ grid entries.
pub fn benchmark_runtime(
    config: &ExperimentConfig,
    n_values: &[usize],
    reps: usize,
) -> Result<Vec<BenchRow>> {
    config.validate()?;
    let reps = reps.max(3);
    let sigma = config.sigma_grid[0];
    let gamma = config.gamma_grid[0];
    let full = load_source(config)?;
    let mut out = Vec::new();
    for &n_total in n_values {
        if n_total > full.n_rows() {
            return Err(Error::Infeasible(format!(
                "benchmark needs {n_total} rows but the dataset has {}",
                full.n_rows()
            )));
        }
        let x = full.x.slice(ndarray::s![..n_total, ..]);
        let y = full.y.slice(ndarray::s![..n_total]);
        let n_labeled = 100.min(n_total / 2);
        let x_pool = x.to_owned();
        let y_labeled = y.slice(ndarray::s![..n_labeled]).to_owned();
        for &method in &config.methods {
            let mut times = Vec::with_capacity(reps);
            for rep in 0..reps {
                let mut rng = derive_rng(
                    config.master_seed,
                    StreamPurpose::Bench,
                    Some(method),
                    n_total as u64,
                    rep as u64,
                );
                let start = Instant::now();
                let preds = fit_and_predict(
                    method,
                    full.task,
                    x_pool.view(),
                    n_labeled,
                    y_labeled.view(),
                    x_pool.slice(ndarray::s![..1, ..]),
                    sigma,
                    gamma,
                    config.m,
                    &mut rng,
                )?;
                times.push(start.elapsed().as_secs_f64());
                debug_assert_eq!(preds.len(), 1);
            }
            times.sort_by(|a, b| a.partial_cmp(b).unwrap());
            out.push(BenchRow {
                method,
                n_total,
                seconds: times[times.len() / 2],
            });
        }
    }
    Ok(out)
}

/// Render benchmark rows as CSV.
pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["method", "n_total", "seconds"])
        .expect("in-memory write");
    for r in rows {
        w.write_record([r.method.name(), &r.n_total.to_string(), &format!("{}", r.seconds)])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flushed")).expect("utf-8")
}

/// Files produced by a run.
#[derive(Debug, Clone)]
pub struct RunOutputs {
    pub rows_csv: std::path::PathBuf,
    pub aggregates_csv: std::path::PathBuf,
    pub timings_csv: std::path::PathBuf,
    pub manifest_json: std::path::PathBuf,
    pub standardization_txt: std::path::PathBuf,
}

#[derive(Serialize)]
struct Manifest<'a> {
    config: &'a ExperimentConfig,
    selected: &'a [SelectedParams],
    /// Hyperparameters are selected per method; a shared-selection protocol
    /// would reuse one (σ, γ) across methods instead.
    cv_selection: &'static str,
    crate_version: &'static str,
}

/// Write the result table, run manifest and dataset-level standardization
/// parameters into `dir`.
pub fn write_outputs(
    table: &ResultTable,
    config: &ExperimentConfig,
    dir: impl AsRef<Path>,
) -> Result<RunOutputs> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let rows_csv = dir.join("rows.csv");
    let aggregates_csv = dir.join("aggregates.csv");
    let timings_csv = dir.join("timings.csv");
    let manifest_json = dir.join("manifest.json");
    let standardization_txt = dir.join("standardization.txt");

    std::fs::write(&rows_csv, table.rows_csv())?;
    std::fs::write(&aggregates_csv, table.aggregates_csv())?;
    std::fs::write(&timings_csv, table.timings_csv())?;

    let manifest = Manifest {
        config,
        selected: &table.selected,
        cv_selection: "per-method",
        crate_version: env!("CARGO_PKG_VERSION"),
    };
    std::fs::write(&manifest_json, serde_json::to_string_pretty(&manifest)?)?;

    // Dataset-level reference transform (each cell re-standardizes on its
    // own training pool).
    let dataset = load_source(config)?;
    let all_rows: Vec<usize> = (0..dataset.n_rows()).collect();
    let params = StandardizationParams::fit(dataset.x.view(), &all_rows)?;
    params.save(&standardization_txt)?;

    Ok(RunOutputs {
        rows_csv,
        aggregates_csv,
        timings_csv,
        manifest_json,
        standardization_txt,
    })
}
