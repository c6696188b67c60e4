//! Command-line experiment runner.
//!
//! Runs the labeled-set sweep protocol on a CSV dataset or the synthetic
//! generator, emitting raw rows, aggregates, timings, and a run manifest.
//! With `--bench`, additionally measures fit wall-time across dataset sizes.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::Parser;

use xnv::experiments::{
    benchmark_runtime, run_experiment, write_outputs, DataSource, ExperimentConfig, Method,
};
use xnv::Task;

#[derive(Parser, Debug)]
#[command(
    name = "xnv",
    about = "Semi-supervised learning experiments with correlated random-feature views",
    version
)]
struct Args {
    /// CSV dataset path (numeric cells, label in the last column).
    #[arg(long, conflicts_with = "synth")]
    data: Option<PathBuf>,

    /// Synthetic dataset spec, e.g. "n=2000,d=10,k=40,sigma=0.2,noise=0.1,seed=0".
    #[arg(long)]
    synth: Option<String>,

    /// Task kind: r (regression) or c (classification).
    #[arg(long, default_value = "r")]
    task: String,

    /// Comma-separated methods: XNV,XKS,SSSL_M,SSSL_2M,SSSL_EXACT,KRR,RFF_M,RFF_2M,NY_RIDGE_M.
    #[arg(long, default_value = "XNV,SSSL_M,KRR")]
    methods: String,

    /// Random features per view.
    #[arg(long, default_value_t = 200)]
    m: usize,

    /// Comma-separated labeled-set sizes; defaults to 100..1000 step 50.
    #[arg(long = "n-grid")]
    n_grid: Option<String>,

    /// Repeated seeds per (method, n) cell.
    #[arg(long, default_value_t = 100)]
    seeds: usize,

    /// Comma-separated σ grid (κ = exp(−σ d²) convention).
    #[arg(long = "sigma-grid")]
    sigma_grid: Option<String>,

    /// Comma-separated γ grid.
    #[arg(long = "gamma-grid")]
    gamma_grid: Option<String>,

    /// Cross-validation folds.
    #[arg(long = "cv-folds", default_value_t = 5)]
    cv_folds: usize,

    /// Labeled-subset size for cross validation.
    #[arg(long = "cv-labeled", default_value_t = 1000)]
    cv_labeled: usize,

    /// Share of rows held out as the test set.
    #[arg(long = "test-fraction", default_value_t = 0.2)]
    test_fraction: f64,

    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,

    /// Master seed; the whole run is reproducible from it.
    #[arg(long = "master-seed", default_value_t = 0)]
    master_seed: u64,

    /// Also run the runtime benchmark over N ∈ {1000, 2000, 4000}.
    #[arg(long, default_value_t = false)]
    bench: bool,

    /// Dataset sizes for --bench.
    #[arg(long = "bench-sizes", default_value = "1000,2000,4000")]
    bench_sizes: String,
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> anyhow::Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse::<T>()
                .map_err(|e| anyhow::anyhow!("invalid {what} entry `{p}`: {e}"))
        })
        .collect()
}

fn build_config(args: &Args) -> anyhow::Result<ExperimentConfig> {
    let task: Task = args.task.parse().context("bad --task")?;
    let source = match (&args.data, &args.synth) {
        (Some(path), None) => DataSource::Csv(path.clone()),
        (None, Some(spec)) => DataSource::Synth(spec.parse().context("bad --synth")?),
        (None, None) => bail!("one of --data or --synth is required"),
        (Some(_), Some(_)) => bail!("--data and --synth are mutually exclusive"),
    };
    let mut config = ExperimentConfig::new(source, task);
    config.methods = parse_list::<Method>(&args.methods, "--methods")?;
    config.m = args.m;
    if let Some(grid) = &args.n_grid {
        config.n_grid = parse_list(grid, "--n-grid")?;
    }
    config.seeds = args.seeds;
    if let Some(grid) = &args.sigma_grid {
        config.sigma_grid = parse_list(grid, "--sigma-grid")?;
    }
    if let Some(grid) = &args.gamma_grid {
        config.gamma_grid = parse_list(grid, "--gamma-grid")?;
    }
    config.cv_folds = args.cv_folds;
    config.cv_labeled = args.cv_labeled;
    config.test_fraction = args.test_fraction;
    config.master_seed = args.master_seed;
    config.validate().context("invalid configuration")?;
    Ok(config)
}

fn run(args: &Args) -> anyhow::Result<()> {
    let config = build_config(args)?;

    eprintln!(
        "running {} method(s) × {} n value(s) × {} seed(s)",
        config.methods.len(),
        config.n_grid.len(),
        config.seeds
    );
    let table = run_experiment(&config)?;
    for sel in &table.selected {
        eprintln!(
            "cross-validation selected σ = {}, γ = {} for {}",
            sel.sigma, sel.gamma, sel.method
        );
    }
    let outputs = write_outputs(&table, &config, &args.out)?;
    eprintln!("wrote {}", outputs.rows_csv.display());
    eprintln!("wrote {}", outputs.aggregates_csv.display());
    eprintln!("wrote {}", outputs.timings_csv.display());
    eprintln!("wrote {}", outputs.manifest_json.display());

    if args.bench {
        let sizes: Vec<usize> = parse_list(&args.bench_sizes, "--bench-sizes")?;
        eprintln!("benchmarking fit time over N ∈ {sizes:?}");
        let bench = benchmark_runtime(&config, &sizes, 3)?;
        let path = args.out.join("bench.csv");
        std::fs::write(&path, xnv::experiments::bench_csv(&bench))?;
        for row in &bench {
            eprintln!("  {:<12} N = {:>6}: {:.3}s", row.method.name(), row.n_total, row.seconds);
        }
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
