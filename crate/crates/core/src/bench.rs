//! Monte Carlo NMSE benchmark over a grid of noise variances and methods.

use std::fmt::Write as _;
use std::path::PathBuf;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::design::{quantize_design, run_method, DesignOutcome, Method, MethodSettings, SolverOptions};
use crate::error::{Error, Result};
use crate::estimation::{ls_estimate, mmse_estimate, nmse};
use crate::files::read_graph;
use crate::graph::{default_bandwidth, generate_rgg, spectral_decompose, Band, Graph, SpectralBasis};
use crate::rng::{stream, Purpose};
use crate::signal::{draw_coefficients, observe, synthesize, GaussianPrior, NoiseModel, SampleSet};

pub const DEFAULT_NOISE_GRID: [f64; 6] = [0.01, 0.05, 0.1, 0.5, 1.0, 2.0];
pub const DEFAULT_TRIALS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    Mmse,
    Ls,
}

impl Estimator {
    pub fn name(self) -> &'static str {
        match self {
            Estimator::Mmse => "mmse",
            Estimator::Ls => "ls",
        }
    }

    /// Bayesian designs are scored with MMSE and non-Bayesian ones with LS;
    /// uniform is scored both ways.
    pub fn for_method(method: Method) -> &'static [Estimator] {
        match method {
            Method::Uniform => &[Estimator::Mmse, Estimator::Ls],
            m if m.is_bayesian() => &[Estimator::Mmse],
            _ => &[Estimator::Ls],
        }
    }
}

impl std::str::FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mmse" => Ok(Estimator::Mmse),
            "ls" => Ok(Estimator::Ls),
            _ => Err(Error::InvalidArgument(format!("unknown estimator `{s}` (expected mmse or ls)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GraphSource {
    File {
        path: PathBuf,
    },
    Rgg {
        n: usize,
        radius: f64,
        /// Defaults to `radius / 2`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bandwidth: Option<f64>,
        seed: u64,
    },
}

impl GraphSource {
    pub fn load(&self) -> Result<Graph> {
        match self {
            GraphSource::File { path } => read_graph(path),
            GraphSource::Rgg {
                n,
                radius,
                bandwidth,
                seed,
            } => generate_rgg(*n, *radius, bandwidth.unwrap_or_else(|| default_bandwidth(*radius)), *seed),
        }
    }
}

fn default_tol() -> f64 {
    SolverOptions::default().tol
}

fn default_max_iters() -> usize {
    SolverOptions::default().max_iters
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub seed: u64,
    pub budget: usize,
    pub trials: usize,
    pub noise_grid: Vec<f64>,
    pub methods: Vec<Method>,
    /// 1-based band indices.
    pub band: Vec<usize>,
    pub mean: Vec<f64>,
    pub variances: Vec<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    pub graph: GraphSource,
}

impl Default for BenchmarkConfig {
    /// 64-vertex RGG, band {10, 20, 30}, M = 10, μ = 1, Σ = diag(1, 0.5, 0.1).
    fn default() -> Self {
        BenchmarkConfig {
            seed: 1,
            budget: 10,
            trials: DEFAULT_TRIALS,
            noise_grid: DEFAULT_NOISE_GRID.to_vec(),
            methods: Method::ALL.to_vec(),
            band: vec![10, 20, 30],
            mean: vec![1.0; 3],
            variances: vec![1.0, 0.5, 0.1],
            tol: default_tol(),
            max_iters: default_max_iters(),
            graph: GraphSource::Rgg {
                n: 64,
                radius: 0.6,
                bandwidth: None,
                seed: 7,
            },
        }
    }
}

impl BenchmarkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.noise_grid.is_empty() {
            return Err(Error::InvalidArgument("noise grid is empty".into()));
        }
        if let Some(&bad) = self.noise_grid.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidNoise(bad));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidArgument("method list is empty".into()));
        }
        if self.budget == 0 {
            return Err(Error::InvalidArgument("budget must be at least 1".into()));
        }
        Ok(())
    }

    pub fn basis(&self) -> Result<SpectralBasis> {
        let graph = self.graph.load()?;
        spectral_decompose(&graph.laplacian())?.with_band(Band::from_one_based(&self.band)?)
    }

    pub fn prior(&self) -> Result<GaussianPrior> {
        if self.mean.len() != self.band.len() {
            return Err(Error::DimensionMismatch {
                what: "prior mean length vs band size",
                expected: self.band.len(),
                found: self.mean.len(),
            });
        }
        GaussianPrior::new(self.mean.clone(), self.variances.clone())
    }

    fn settings(&self) -> MethodSettings {
        MethodSettings {
            solver: SolverOptions {
                tol: self.tol,
                max_iters: self.max_iters,
            },
            u2_weight: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub noise_variance: f64,
    pub method: Method,
    pub estimator: Estimator,
    /// Mean over successful trials; NaN when every trial failed.
    pub nmse_mean: f64,
    pub nmse_std: f64,
    pub trials: usize,
    /// Trials where LS met a singular design; excluded from the mean.
    pub failures: usize,
    pub objective_kind: String,
    pub objective: f64,
}

impl BenchmarkRow {
    pub fn successes(&self) -> usize {
        self.trials - self.failures
    }

    /// Standard error of `nmse_mean`.
    pub fn std_error(&self) -> f64 {
        self.nmse_std / (self.successes() as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkResult {
    pub config: BenchmarkConfig,
    pub rows: Vec<BenchmarkRow>,
}

/// One simulated acquisition and its estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub coefficients: DVector<f64>,
    pub samples: SampleSet,
    pub estimate: DVector<f64>,
    pub nmse: f64,
}

/// Runs trial `index` under `master`: draws coefficients, quantizes the
/// design (unless it came with fixed counts), observes and estimates.
///
/// Each random draw uses its own stream, so every design and noise level sees
/// the same coefficients and standard-normal noise for a given trial.
pub fn run_trial(
    basis: &SpectralBasis,
    prior: &GaussianPrior,
    noise: &NoiseModel,
    outcome: &DesignOutcome,
    estimator: Estimator,
    master: u64,
    index: u64,
) -> Result<Trial> {
    let coefficients = draw_coefficients(prior, &mut stream(master, Purpose::Coefficients, index));
    let signal = synthesize(basis, &coefficients)?;
    let samples = match &outcome.counts {
        Some(counts) => counts.clone(),
        None => quantize_design(&outcome.design, &mut stream(master, Purpose::Quantization, index)),
    };
    let y = observe(&signal, &samples, noise, &mut stream(master, Purpose::Noise, index))?;
    let estimate = match estimator {
        Estimator::Mmse => mmse_estimate(basis, prior, noise, &samples, &y)?.estimate,
        Estimator::Ls => ls_estimate(basis, noise, &samples, &y)?.estimate,
    };
    let nmse = nmse(&signal, &estimate, basis)?;
    Ok(Trial {
        coefficients,
        samples,
        estimate,
        nmse,
    })
}

fn score_cell(
    basis: &SpectralBasis,
    prior: &GaussianPrior,
    noise: &NoiseModel,
    outcome: &DesignOutcome,
    estimator: Estimator,
    config: &BenchmarkConfig,
) -> Result<BenchmarkRow> {
    let results: Vec<Result<Option<f64>>> = (0..config.trials as u64)
        .into_par_iter()
        .map(|t| match run_trial(basis, prior, noise, outcome, estimator, config.seed, t) {
            Ok(trial) => Ok(Some(trial.nmse)),
            Err(Error::SingularDesign { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect();
    let mut values = Vec::with_capacity(results.len());
    let mut failures = 0;
    for r in results {
        match r? {
            Some(v) => values.push(v),
            None => failures += 1,
        }
    }
    let count = values.len() as f64;
    let mean = values.iter().sum::<f64>() / count;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(BenchmarkRow {
        noise_variance: noise.variance(),
        method: outcome.method,
        estimator,
        nmse_mean: mean,
        nmse_std: std,
        trials: config.trials,
        failures,
        objective_kind: outcome.objective_name.to_string(),
        objective: outcome.objective,
    })
}

/// Rows are ordered by noise variance (as given), then method (as given),
/// then estimator.
pub fn run_benchmark(config: &BenchmarkConfig) -> Result<BenchmarkResult> {
    config.validate()?;
    let basis = config.basis()?;
    let prior = config.prior()?;
    let settings = config.settings();
    let mut rows = Vec::new();
    for &sw2 in &config.noise_grid {
        let noise = NoiseModel::new(sw2)?;
        for &method in &config.methods {
            let outcome = run_method(method, &basis, &prior, noise, config.budget, &settings)?;
            for &estimator in Estimator::for_method(method) {
                let row = score_cell(&basis, &prior, &noise, &outcome, estimator, config)?;
                log::info!(
                    "noise {sw2} {method}/{}: nmse {:.4e} ({} failures)",
                    estimator.name(),
                    row.nmse_mean,
                    row.failures
                );
                rows.push(row);
            }
        }
    }
    Ok(BenchmarkResult {
        config: config.clone(),
        rows,
    })
}

impl BenchmarkResult {
    pub fn row(&self, noise_variance: f64, method: Method, estimator: Estimator) -> Option<&BenchmarkRow> {
        self.rows
            .iter()
            .find(|r| r.noise_variance == noise_variance && r.method == method && r.estimator == estimator)
    }

    /// Metadata comment lines, a header row and one whitespace-separated
    /// row per cell.
    pub fn to_table(&self) -> String {
        let c = &self.config;
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let mut out = String::new();
        let _ = writeln!(out, "# seed = {}", c.seed);
        let _ = writeln!(out, "# trials = {}", c.trials);
        let _ = writeln!(out, "# budget = {}", c.budget);
        let _ = writeln!(out, "# noise_grid = {}", join(&c.noise_grid));
        let band: Vec<_> = c.band.iter().map(|b| b.to_string()).collect();
        let _ = writeln!(out, "# band = {}", band.join(","));
        let _ = writeln!(out, "# mean = {}", join(&c.mean));
        let _ = writeln!(out, "# variances = {}", join(&c.variances));
        match &c.graph {
            GraphSource::File { path } => {
                let _ = writeln!(out, "# graph = file {}", path.display());
            }
            GraphSource::Rgg {
                n,
                radius,
                bandwidth,
                seed,
            } => {
                let h = bandwidth.unwrap_or_else(|| default_bandwidth(*radius));
                let _ = writeln!(out, "# graph = rgg n={n} radius={radius} bandwidth={h} seed={seed}");
            }
        }
        out.push_str("noise_variance method estimator nmse_mean nmse_std trials failures objective_kind objective\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{} {} {} {:.9e} {:.9e} {} {} {} {:.12e}",
                r.noise_variance,
                r.method,
                r.estimator.name(),
                r.nmse_mean,
                r.nmse_std,
                r.trials,
                r.failures,
                r.objective_kind,
                r.objective
            );
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map(|mut s| {
                s.push('\n');
                s
            })
            .map_err(|e| Error::InvalidArgument(format!("cannot serialize benchmark result: {e}")))
    }
}
