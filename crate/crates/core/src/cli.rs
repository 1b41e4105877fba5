//! Command-line interface.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bench::{run_benchmark, run_trial, BenchmarkConfig, Estimator};
use crate::design::{quantize_design, run_method, DesignOutcome, Method, MethodSettings, SolverOptions};
use crate::error::{Error, Result};
use crate::estimation::Design;
use crate::files::{read_graph, read_toml, to_toml, write_text, DesignFile, EstimateFile, PriorFile};
use crate::gershgorin::disc_report;
use crate::graph::{default_bandwidth, generate_rgg, spectral_decompose, Band, SpectralBasis};
use crate::rng::{stream, Purpose};
use crate::signal::{GaussianPrior, NoiseModel, SampleSet};

#[derive(Debug, Parser)]
#[command(name = "bdos", version, about = "Bayesian sampling-set design for bandlimited graph signals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a connected random geometric graph on the unit square.
    GenGraph(GenGraphArgs),
    /// Compute a sampling design.
    Design(DesignArgs),
    /// Simulate one acquisition under a design and estimate the signal.
    Estimate(EstimateArgs),
    /// Dump Gershgorin discs for the uniform and designed Gram matrices.
    Discs(DiscsArgs),
    /// Run the Monte Carlo NMSE benchmark.
    Benchmark(BenchmarkArgs),
}

#[derive(Debug, Args)]
pub struct GenGraphArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    pub n: u64,
    #[arg(long)]
    pub radius: f64,
    /// Gaussian kernel bandwidth (default: radius / 2).
    #[arg(long)]
    pub bandwidth: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Graph, prior and band shared by the design-consuming subcommands.
#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// TOML prior file with `band`, `mean`, `variances`, `noise_variance`.
    #[arg(long)]
    pub prior: PathBuf,
    /// 1-based band indices, overriding the prior file's band.
    #[arg(long, value_delimiter = ',')]
    pub band: Option<Vec<usize>>,
    /// Noise variance, overriding the prior file's value.
    #[arg(long)]
    pub noise: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub budget: usize,
    #[arg(long)]
    pub method: Method,
    /// Seed for quantizing the design into counts.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = SolverOptions::default().tol)]
    pub tol: f64,
    #[arg(long, default_value_t = SolverOptions::default().max_iters)]
    pub max_iters: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Design file written by `design`.
    #[arg(long)]
    pub design: PathBuf,
    /// Defaults to MMSE for Bayesian methods and LS otherwise.
    #[arg(long)]
    pub estimator: Option<Estimator>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiscsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub design: PathBuf,
    /// Budget override (default: the design file's budget).
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    /// TOML benchmark configuration (default: the built-in 64-vertex setup).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub budget: Option<usize>,
    /// Comma-separated noise grid.
    #[arg(long, value_delimiter = ',')]
    pub noise: Option<Vec<f64>>,
    /// Comma-separated method list.
    #[arg(long, value_delimiter = ',')]
    pub method: Option<Vec<Method>>,
    #[arg(long, value_delimiter = ',')]
    pub band: Option<Vec<usize>>,
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Table output; a JSON copy is written next to it with a `.json` extension.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_text(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

struct Model {
    basis: SpectralBasis,
    prior: GaussianPrior,
    noise: NoiseModel,
}

fn load_model(args: &ModelArgs) -> Result<Model> {
    let graph = read_graph(&args.graph)?;
    let file: PriorFile = read_toml(&args.prior)?;
    let band = match &args.band {
        Some(b) => Band::from_one_based(b)?,
        None => file.band()?,
    };
    let basis = spectral_decompose(&graph.laplacian())?.with_band(band)?;
    let prior = file.prior()?;
    let noise = NoiseModel::new(args.noise.unwrap_or(file.noise_variance))?;
    Ok(Model { basis, prior, noise })
}

fn design_from_file(file: &DesignFile, n: usize) -> Result<(Design, SampleSet)> {
    if file.eta.len() != n || file.counts.len() != n {
        return Err(Error::DimensionMismatch {
            what: "design length vs graph size",
            expected: n,
            found: file.eta.len().min(file.counts.len()),
        });
    }
    let design = Design::new(file.eta.clone().into(), file.budget)?;
    Ok((design, SampleSet::new(file.counts.clone())))
}

fn cmd_gen_graph(args: &GenGraphArgs) -> Result<()> {
    let bandwidth = args.bandwidth.unwrap_or_else(|| default_bandwidth(args.radius));
    let graph = generate_rgg(args.n as usize, args.radius, bandwidth, args.seed)?;
    emit(args.out.as_deref(), &graph.to_text())
}

fn cmd_design(args: &DesignArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let settings = MethodSettings {
        solver: SolverOptions {
            tol: args.tol,
            max_iters: args.max_iters,
        },
        u2_weight: None,
    };
    let outcome = run_method(args.method, &model.basis, &model.prior, model.noise, args.budget, &settings)?;
    let counts = match &outcome.counts {
        Some(c) => c.clone(),
        None => quantize_design(&outcome.design, &mut stream(args.seed, Purpose::Quantization, 0)),
    };
    let file = design_file(&outcome, counts, args.seed);
    emit(args.out.as_deref(), &to_toml(&file)?)
}

fn design_file(outcome: &DesignOutcome, counts: SampleSet, seed: u64) -> DesignFile {
    DesignFile {
        method: outcome.method.name().to_string(),
        budget: outcome.design.budget(),
        objective_kind: outcome.objective_name.to_string(),
        objective: outcome.objective,
        gap: outcome.gap,
        iterations: outcome.iterations,
        seed,
        eta: outcome.design.eta().iter().copied().collect(),
        counts: counts.counts().to_vec(),
    }
}

fn cmd_estimate(args: &EstimateArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let file: DesignFile = read_toml(&args.design)?;
    let method: Method = file.method.parse()?;
    let (design, counts) = design_from_file(&file, model.basis.n())?;
    let estimator = args
        .estimator
        .unwrap_or(Estimator::for_method(method)[0]);
    let outcome = DesignOutcome {
        method,
        design,
        counts: Some(counts),
        objective_name: "",
        objective: file.objective,
        gap: file.gap,
        iterations: file.iterations,
    };
    let trial = run_trial(&model.basis, &model.prior, &model.noise, &outcome, estimator, args.seed, 0)?;
    let out = EstimateFile {
        estimator: estimator.name().to_string(),
        seed: args.seed,
        budget: trial.samples.budget(),
        nmse: trial.nmse,
        truth: trial.coefficients.iter().copied().collect(),
        estimate: trial.estimate.iter().copied().collect(),
        counts: trial.samples.counts().to_vec(),
    };
    emit(args.out.as_deref(), &to_toml(&out)?)
}

fn cmd_discs(args: &DiscsArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let file: DesignFile = read_toml(&args.design)?;
    let (design, _) = design_from_file(&file, model.basis.n())?;
    let design = match args.budget {
        Some(m) => design.with_budget(m),
        None => design,
    };
    let report = disc_report(&model.basis, &model.prior, &model.noise, &design)?;
    emit(args.out.as_deref(), &report.to_table())
}

fn cmd_benchmark(args: &BenchmarkArgs) -> Result<()> {
    let mut config = match &args.config {
        Some(path) => read_toml::<BenchmarkConfig>(path)?,
        None => BenchmarkConfig::default(),
    };
    if let Some(t) = args.trials {
        config.trials = t;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(m) = args.budget {
        config.budget = m;
    }
    if let Some(grid) = &args.noise {
        config.noise_grid = grid.clone();
    }
    if let Some(methods) = &args.method {
        config.methods = methods.clone();
    }
    if let Some(band) = &args.band {
        config.band = band.clone();
    }
    if let Some(path) = &args.graph {
        config.graph = crate::bench::GraphSource::File { path: path.clone() };
    }
    if let Some(tol) = args.tol {
        config.tol = tol;
    }
    let result = run_benchmark(&config)?;
    match &args.out {
        Some(path) => {
            write_text(path, &result.to_table())?;
            write_text(&path.with_extension("json"), &result.to_json()?)
        }
        None => emit(None, &result.to_table()),
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::GenGraph(a) => cmd_gen_graph(a),
        Command::Design(a) => cmd_design(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Discs(a) => cmd_discs(a),
        Command::Benchmark(a) => cmd_benchmark(a),
    }
}
