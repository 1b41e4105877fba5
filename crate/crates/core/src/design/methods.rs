use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{
    bayesian_coherence_design, greedy_design, nonbayesian_coherence_design, solve_relaxation,
    DesignProblem, SolverOptions, Utility,
};
use crate::error::{Error, Result};
use crate::estimation::Design;
use crate::graph::SpectralBasis;
use crate::signal::{GaussianPrior, NoiseModel, SampleSet};

/// Sampling-set design strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Relaxed Bayesian D-optimal design (maximizes `U1`).
    RelaxationU1,
    /// Relaxed Bayesian A-optimal design (maximizes `U2`).
    RelaxationU2,
    /// Relaxed non-Bayesian D-optimal design (maximizes `log det Σ*_nB⁻¹`).
    NbRelaxation,
    BayesCoherence,
    NbCoherence,
    /// Greedy Bayesian D-optimal picks; yields integer counts directly.
    Greedy,
    Uniform,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::RelaxationU1,
        Method::RelaxationU2,
        Method::NbRelaxation,
        Method::BayesCoherence,
        Method::NbCoherence,
        Method::Greedy,
        Method::Uniform,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::RelaxationU1 => "relaxation-u1",
            Method::RelaxationU2 => "relaxation-u2",
            Method::NbRelaxation => "nb-relaxation",
            Method::BayesCoherence => "bayes-coherence",
            Method::NbCoherence => "nb-coherence",
            Method::Greedy => "greedy",
            Method::Uniform => "uniform",
        }
    }

    /// Whether the design uses the prior. `Uniform` uses neither prior nor
    /// topology and is classed as non-Bayesian.
    pub fn is_bayesian(self) -> bool {
        matches!(
            self,
            Method::RelaxationU1 | Method::RelaxationU2 | Method::BayesCoherence | Method::Greedy
        )
    }

    /// Non-Bayesian counterpart for paired comparisons. Greedy is paired with
    /// the non-Bayesian D-optimal relaxation.
    pub fn nonbayesian_counterpart(self) -> Option<Method> {
        match self {
            Method::RelaxationU1 | Method::RelaxationU2 | Method::Greedy => Some(Method::NbRelaxation),
            Method::BayesCoherence => Some(Method::NbCoherence),
            _ => None,
        }
    }

    /// Utility reported as the design objective.
    fn utility(self, k: usize, weight: Option<&DMatrix<f64>>) -> Utility {
        match self {
            Method::RelaxationU2 => Utility::AOptimal {
                weight: weight.cloned().unwrap_or_else(|| DMatrix::identity(k, k)),
            },
            Method::NbRelaxation | Method::NbCoherence => Utility::NonBayesianD,
            _ => Utility::DOptimal,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Method::ALL.iter().map(|m| m.name()).collect();
                Error::InvalidArgument(format!("unknown method `{s}` (expected one of {})", names.join(", ")))
            })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MethodSettings {
    pub solver: SolverOptions,
    /// `U2` weight matrix; identity when absent.
    pub u2_weight: Option<DMatrix<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignOutcome {
    pub method: Method,
    pub design: Design,
    /// Integer counts for methods that produce them directly (greedy).
    pub counts: Option<SampleSet>,
    /// `u1`, `u2` or `nb-logdet`.
    pub objective_name: &'static str,
    pub objective: f64,
    /// Frank–Wolfe gap of the objective at `design`.
    pub gap: f64,
    pub iterations: usize,
}

/// Computes the design for `method`.
///
/// The objective is `U1` for the Bayesian D-type methods and uniform, `U2`
/// for `relaxation-u2`, and the LS log-determinant for the non-Bayesian
/// methods.
pub fn run_method(
    method: Method,
    basis: &SpectralBasis,
    prior: &GaussianPrior,
    noise: NoiseModel,
    budget: usize,
    settings: &MethodSettings,
) -> Result<DesignOutcome> {
    let utility = method.utility(basis.k(), settings.u2_weight.as_ref());
    let objective_name = match utility {
        Utility::DOptimal => "u1",
        Utility::AOptimal { .. } => "u2",
        Utility::NonBayesianD => "nb-logdet",
    };
    let problem = DesignProblem::new(basis, prior, noise, budget, utility)?;
    let mut counts = None;
    let mut iterations = 0;
    let design = match method {
        Method::RelaxationU1 | Method::RelaxationU2 | Method::NbRelaxation => {
            let report = solve_relaxation(&problem, settings.solver);
            iterations = report.iterations;
            if !report.converged {
                log::warn!(
                    "{method}: duality gap {:e} above tolerance after {} iterations",
                    report.duality_gap,
                    report.iterations
                );
            }
            report.design
        }
        Method::BayesCoherence => bayesian_coherence_design(basis, prior, budget)?,
        Method::NbCoherence => nonbayesian_coherence_design(basis, budget),
        Method::Uniform => Design::uniform(basis.n(), budget),
        Method::Greedy => {
            if budget == 0 {
                return Err(Error::InvalidArgument("greedy design needs a budget of at least 1".into()));
            }
            let picks = greedy_design(&problem);
            let design = Design::from_counts(&picks)?;
            counts = Some(picks);
            design
        }
    };
    Ok(DesignOutcome {
        method,
        objective_name,
        objective: problem.value(design.eta()),
        gap: problem.duality_gap(design.eta()),
        design,
        counts,
        iterations,
    })
}
