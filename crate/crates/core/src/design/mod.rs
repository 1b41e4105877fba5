//! Design utilities, the relaxed-problem solver, and heuristic designs.
//!
//! All utilities are functions of the `K×K` information matrix
//! `J(η) = σ_w^{-2} M V_𝒦^T diag(η) V_𝒦 + Σ_f̂^{-1}`:
//!
//! | utility | value | `∂/∂η_i` |
//! |---------|-------|----------|
//! | D-optimal (`U1`) | `−K/2 log 2π − K/2 + ½ log det J` | `M/(2σ_w²) u_iᵀ J⁻¹ u_i` |
//! | A-optimal (`U2`) | `−tr(A J⁻¹)` | `M/σ_w² u_iᵀ J⁻¹ A J⁻¹ u_i` |
//! | non-Bayesian D | `log det J_nB` (no prior term) | `M/σ_w² u_iᵀ J_nB⁻¹ u_i` |
//!
//! Each is concave in `η`, so the Frank–Wolfe gap of [`solve_relaxation`]
//! bounds the distance to the global optimum of the relaxed problem.

mod heuristics;
mod methods;
mod quantize;
mod solver;

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::estimation::{weighted_gram, Design};
use crate::graph::SpectralBasis;
use crate::signal::{GaussianPrior, NoiseModel};

pub use heuristics::{bayesian_coherence_design, greedy_design, nonbayesian_coherence_design};
pub use methods::{run_method, DesignOutcome, Method, MethodSettings};
pub use quantize::quantize_design;
pub use solver::{solve_relaxation, SolverOptions, SolverReport};

#[derive(Debug, Clone, PartialEq)]
pub enum Utility {
    /// Expected information gain, `U1`.
    DOptimal,
    /// Negative expected weighted quadratic loss `U2 = −tr(A Σ*_B)`.
    AOptimal { weight: DMatrix<f64> },
    /// Log-determinant of the least-squares information matrix.
    NonBayesianD,
}

impl Utility {
    /// `U2` with `A = I`, the plain mean squared error.
    pub fn a_optimal_identity(k: usize) -> Self {
        Utility::AOptimal {
            weight: DMatrix::identity(k, k),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DesignProblem<'a> {
    basis: &'a SpectralBasis,
    prior: &'a GaussianPrior,
    noise: NoiseModel,
    budget: usize,
    utility: Utility,
}

/// Objective value and gradient at one design point.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub value: f64,
    /// `None` when the information matrix is singular (value is `-inf`).
    pub gradient: Option<DVector<f64>>,
}

impl<'a> DesignProblem<'a> {
    pub fn new(
        basis: &'a SpectralBasis,
        prior: &'a GaussianPrior,
        noise: NoiseModel,
        budget: usize,
        utility: Utility,
    ) -> Result<Self> {
        prior.check_basis(basis)?;
        if let Utility::AOptimal { weight } = &utility {
            let k = basis.k();
            if weight.shape() != (k, k) {
                return Err(Error::DimensionMismatch {
                    what: "weight matrix order",
                    expected: k,
                    found: weight.nrows(),
                });
            }
            let scale = weight.amax().max(1.0);
            if (weight - weight.transpose()).amax() > 1e-10 * scale {
                return Err(Error::InvalidArgument("weight matrix is not symmetric".into()));
            }
            let sym = (weight + weight.transpose()) * 0.5;
            if sym.symmetric_eigenvalues().min() < -1e-10 * scale {
                return Err(Error::InvalidArgument(
                    "weight matrix is not positive semidefinite".into(),
                ));
            }
        }
        Ok(DesignProblem {
            basis,
            prior,
            noise,
            budget,
            utility,
        })
    }

    pub fn basis(&self) -> &'a SpectralBasis {
        self.basis
    }

    pub fn prior(&self) -> &'a GaussianPrior {
        self.prior
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn utility(&self) -> &Utility {
        &self.utility
    }

    pub fn with_utility(&self, utility: Utility) -> Result<Self> {
        DesignProblem::new(self.basis, self.prior, self.noise, self.budget, utility)
    }

    fn information(&self, eta: &DVector<f64>) -> DMatrix<f64> {
        let scale = self.budget as f64 / self.noise.variance();
        let mut info = weighted_gram(self.basis, eta) * scale;
        if self.utility != Utility::NonBayesianD {
            for k in 0..self.prior.k() {
                info[(k, k)] += 1.0 / self.prior.variances()[k];
            }
        }
        info
    }

    fn check_eta(&self, eta: &DVector<f64>) {
        assert_eq!(eta.len(), self.basis.n(), "design length must equal vertex count");
    }

    pub fn evaluate(&self, eta: &DVector<f64>) -> Evaluation {
        self.check_eta(eta);
        let k = self.basis.k();
        let Some(chol) = self.information(eta).cholesky() else {
            return Evaluation {
                value: f64::NEG_INFINITY,
                gradient: None,
            };
        };
        let logdet = 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        let cov = chol.inverse();
        let v = self.basis.band_vectors();
        let c = self.budget as f64 / self.noise.variance();
        let (value, w, scale) = match &self.utility {
            Utility::DOptimal => (
                -(k as f64) / 2.0 * ((2.0 * PI).ln() + 1.0) + 0.5 * logdet,
                v * &cov,
                c / 2.0,
            ),
            Utility::NonBayesianD => (logdet, v * &cov, c),
            Utility::AOptimal { weight } => {
                let value = -(weight * &cov).trace();
                (value, v * (&cov * weight * &cov), c)
            }
        };
        let gradient = DVector::from_iterator(
            self.basis.n(),
            (0..self.basis.n()).map(|i| scale * w.row(i).dot(&v.row(i))),
        );
        Evaluation {
            value,
            gradient: Some(gradient),
        }
    }

    pub fn value(&self, eta: &DVector<f64>) -> f64 {
        self.check_eta(eta);
        match self.information(eta).cholesky() {
            None => f64::NEG_INFINITY,
            Some(chol) => {
                let logdet = 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
                let k = self.basis.k() as f64;
                match &self.utility {
                    Utility::DOptimal => -k / 2.0 * ((2.0 * PI).ln() + 1.0) + 0.5 * logdet,
                    Utility::NonBayesianD => logdet,
                    Utility::AOptimal { weight } => -(weight * chol.inverse()).trace(),
                }
            }
        }
    }

    /// Gradient of the utility; `None` where it is undefined (singular
    /// non-Bayesian information matrix).
    pub fn gradient(&self, eta: &DVector<f64>) -> Option<DVector<f64>> {
        self.evaluate(eta).gradient
    }

    /// Exact change `U(η + δ) − U(η)`, computed without cancellation.
    ///
    /// For the log-det utilities this is `c Σ log1p(μ_j)` with `μ_j` the
    /// eigenvalues of `L⁻¹ ΔJ L⁻ᵀ` (`J = L Lᵀ`); for `U2` it is
    /// `tr(A J⁻¹ ΔJ J'⁻¹)`. Returns `-inf` if `J(η + δ)` is not positive
    /// definite and `NaN` if `J(η)` is not.
    pub fn increment(&self, eta: &DVector<f64>, delta: &DVector<f64>) -> f64 {
        self.check_eta(eta);
        self.check_eta(delta);
        let info = self.information(eta);
        let scale = self.budget as f64 / self.noise.variance();
        let d_info = weighted_gram(self.basis, delta) * scale;
        let Some(chol) = info.clone().cholesky() else {
            return f64::NAN;
        };
        match &self.utility {
            Utility::DOptimal | Utility::NonBayesianD => {
                let l = chol.l();
                let Some(left) = l.solve_lower_triangular(&d_info) else {
                    return f64::NAN;
                };
                let Some(whitened) = l.solve_lower_triangular(&left.transpose()) else {
                    return f64::NAN;
                };
                let sym = (&whitened + whitened.transpose()) * 0.5;
                let mut total = 0.0;
                for mu in sym.symmetric_eigenvalues().iter() {
                    if *mu <= -1.0 {
                        return f64::NEG_INFINITY;
                    }
                    total += mu.ln_1p();
                }
                if self.utility == Utility::DOptimal {
                    0.5 * total
                } else {
                    total
                }
            }
            Utility::AOptimal { weight } => {
                let Some(next) = (info + &d_info).cholesky() else {
                    return f64::NEG_INFINITY;
                };
                (weight * chol.inverse() * d_info * next.inverse()).trace()
            }
        }
    }

    /// Frank–Wolfe gap `max_i g_i − gᵀη`, `+inf` where the gradient is undefined.
    pub fn duality_gap(&self, eta: &DVector<f64>) -> f64 {
        match self.gradient(eta) {
            Some(g) => g.max() - g.dot(eta),
            None => f64::INFINITY,
        }
    }
}

/// Expected information gain `U1(η)`.
pub fn u1_value(
    basis: &SpectralBasis,
    prior: &GaussianPrior,
    noise: &NoiseModel,
    design: &Design,
) -> Result<f64> {
    let p = DesignProblem::new(basis, prior, *noise, design.budget(), Utility::DOptimal)?;
    check_len(basis, design)?;
    Ok(p.value(design.eta()))
}

/// `U2(η) = −tr(A Σ*_B(η))`.
pub fn u2_value(
    basis: &SpectralBasis,
    prior: &GaussianPrior,
    noise: &NoiseModel,
    design: &Design,
    weight: &DMatrix<f64>,
) -> Result<f64> {
    let p = DesignProblem::new(
        basis,
        prior,
        *noise,
        design.budget(),
        Utility::AOptimal {
            weight: weight.clone(),
        },
    )?;
    check_len(basis, design)?;
    Ok(p.value(design.eta()))
}

/// Analytic gradient of the problem's utility with respect to `η`.
pub fn utility_gradient(problem: &DesignProblem<'_>, design: &Design) -> Result<DVector<f64>> {
    check_len(problem.basis, design)?;
    problem
        .gradient(design.eta())
        .ok_or(Error::SingularDesign {
            condition: f64::INFINITY,
        })
}

fn check_len(basis: &SpectralBasis, design: &Design) -> Result<()> {
    if design.n() != basis.n() {
        return Err(Error::DimensionMismatch {
            what: "design length",
            expected: basis.n(),
            found: design.n(),
        });
    }
    Ok(())
}
