//! Bayesian (MMSE) and least-squares estimators of the band coefficients.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::SpectralBasis;
use crate::signal::{GaussianPrior, NoiseModel, SampleSet};

/// LS information matrices with condition number above this are singular.
pub const LS_CONDITION_LIMIT: f64 = 1e12;

/// Sampling proportions `η` on the simplex together with the budget `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    eta: DVector<f64>,
    budget: usize,
}

impl Design {
    pub const SUM_TOLERANCE: f64 = 1e-12;

    pub fn new(eta: DVector<f64>, budget: usize) -> Result<Self> {
        if eta.is_empty() {
            return Err(Error::InvalidDesign("empty design".into()));
        }
        if let Some(x) = eta.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::InvalidDesign(format!("proportion {x} outside [0, 1]")));
        }
        let sum = eta.sum();
        if (sum - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(Error::InvalidDesign(format!("proportions sum to {sum}")));
        }
        Ok(Design { eta, budget })
    }

    pub fn uniform(n: usize, budget: usize) -> Self {
        Design {
            eta: DVector::from_element(n, 1.0 / n as f64),
            budget,
        }
    }

    /// `η = m / M`. Fails for an empty sample set.
    pub fn from_counts(samples: &SampleSet) -> Result<Self> {
        let m = samples.budget();
        if m == 0 {
            return Err(Error::InvalidDesign("sample set is empty".into()));
        }
        let eta = DVector::from_iterator(
            samples.n(),
            samples.counts().iter().map(|&c| c as f64 / m as f64),
        );
        Design::new(eta, m)
    }

    pub fn eta(&self) -> &DVector<f64> {
        &self.eta
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn n(&self) -> usize {
        self.eta.len()
    }

    pub fn with_budget(&self, budget: usize) -> Self {
        Design {
            eta: self.eta.clone(),
            budget,
        }
    }
}

/// `V_𝒦^T diag(weights) V_𝒦`.
pub(crate) fn weighted_gram(basis: &SpectralBasis, weights: &DVector<f64>) -> DMatrix<f64> {
    let v = basis.band_vectors();
    let mut scaled = v.clone();
    for (i, mut row) in scaled.row_iter_mut().enumerate() {
        row *= weights[i];
    }
    v.tr_mul(&scaled)
}

fn check_design(basis: &SpectralBasis, design: &Design) -> Result<()> {
    if design.n() != basis.n() {
        return Err(Error::DimensionMismatch {
            what: "design length",
            expected: basis.n(),
            found: design.n(),
        });
    }
    Ok(())
}

/// Posterior precision `σ_w^{-2} M Σ η_i u_i u_i^T + Σ_f̂^{-1}`.
///
/// Without a prior this is the LS information matrix `Σ*_nB(η)^{-1}`.
pub fn information_matrix(
    basis: &SpectralBasis,
    prior: Option<&GaussianPrior>,
    noise: &NoiseModel,
    design: &Design,
) -> Result<DMatrix<f64>> {
    check_design(basis, design)?;
    let scale = design.budget as f64 / noise.variance();
    let mut info = weighted_gram(basis, design.eta()) * scale;
    if let Some(prior) = prior {
        prior.check_basis(basis)?;
        for k in 0..prior.k() {
            info[(k, k)] += 1.0 / prior.variances()[k];
        }
    }
    Ok(info)
}

/// Bayesian posterior covariance `Σ*_B(η)`.
pub fn posterior_covariance(
    basis: &SpectralBasis,
    prior: &GaussianPrior,
    noise: &NoiseModel,
    design: &Design,
) -> Result<DMatrix<f64>> {
    let info = information_matrix(basis, Some(prior), noise, design)?;
    Ok(spd_inverse(info).expect("posterior precision is positive definite"))
}

pub(crate) fn spd_inverse(m: DMatrix<f64>) -> Option<DMatrix<f64>> {
    let inv = m.cholesky()?.inverse();
    Some((&inv + inv.transpose()) * 0.5)
}

/// Posterior mean and covariance of `f̂_𝒦`.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSummary {
    pub estimate: DVector<f64>,
    pub covariance: DMatrix<f64>,
}

fn check_observations(samples: &SampleSet, observations: &DVector<f64>) -> Result<()> {
    if observations.len() != samples.budget() {
        return Err(Error::DimensionMismatch {
            what: "observation count",
            expected: samples.budget(),
            found: observations.len(),
        });
    }
    Ok(())
}

/// `V_𝒦^T Ψ^T y`, accumulated over the sampling sequence.
fn back_project(basis: &SpectralBasis, samples: &SampleSet, observations: &DVector<f64>) -> DVector<f64> {
    let v = basis.band_vectors();
    let mut acc = DVector::zeros(basis.k());
    for (t, &i) in samples.sequence().iter().enumerate() {
        acc += v.row(i).transpose() * observations[t];
    }
    acc
}

fn count_weights(samples: &SampleSet) -> DVector<f64> {
    DVector::from_iterator(samples.n(), samples.counts().iter().map(|&c| c as f64))
}

/// MMSE estimate `Σ*_B (σ_w^{-2} V_𝒦^T Ψ^T y + Σ_f̂^{-1} μ)`.
pub fn mmse_estimate(
    basis: &SpectralBasis,
    prior: &GaussianPrior,
    noise: &NoiseModel,
    samples: &SampleSet,
    observations: &DVector<f64>,
) -> Result<PosteriorSummary> {
    prior.check_basis(basis)?;
    samples.check_n(basis.n())?;
    check_observations(samples, observations)?;
    let sw2 = noise.variance();
    let mut info = weighted_gram(basis, &count_weights(samples)) / sw2;
    for k in 0..prior.k() {
        info[(k, k)] += 1.0 / prior.variances()[k];
    }
    let covariance = spd_inverse(info).expect("posterior precision is positive definite");
    let rhs = back_project(basis, samples, observations) / sw2
        + prior.mean().component_div(prior.variances());
    Ok(PosteriorSummary {
        estimate: &covariance * rhs,
        covariance,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LsEstimate {
    pub estimate: DVector<f64>,
    /// `Σ*_nB = σ_w² (V_𝒦^T Ψ^T Ψ V_𝒦)^{-1}`.
    pub covariance: DMatrix<f64>,
}

/// Least-squares estimate `(Ψ V_𝒦)^+ y`.
///
/// Fails with [`Error::SingularDesign`] when `V_𝒦^T Ψ^T Ψ V_𝒦` has
/// condition number above [`LS_CONDITION_LIMIT`] (including fewer than `K`
/// observations).
pub fn ls_estimate(
    basis: &SpectralBasis,
    noise: &NoiseModel,
    samples: &SampleSet,
    observations: &DVector<f64>,
) -> Result<LsEstimate> {
    samples.check_n(basis.n())?;
    check_observations(samples, observations)?;
    let k = basis.k();
    if samples.budget() < k {
        return Err(Error::SingularDesign {
            condition: f64::INFINITY,
        });
    }
    let v = basis.band_vectors();
    let seq = samples.sequence();
    let mut a = DMatrix::zeros(seq.len(), k);
    for (t, &i) in seq.iter().enumerate() {
        a.set_row(t, &v.row(i));
    }
    let svd = a.svd(true, true);
    let s_max = svd.singular_values.max();
    let s_min = svd.singular_values.min();
    let condition = if s_min > 0.0 {
        (s_max / s_min).powi(2)
    } else {
        f64::INFINITY
    };
    if condition.is_nan() || condition > LS_CONDITION_LIMIT {
        return Err(Error::SingularDesign { condition });
    }
    let estimate = svd
        .solve(observations, 1e-12 * s_max)
        .expect("SVD computed with U and V^T");
    let vt = svd.v_t.as_ref().expect("SVD computed with V^T");
    let inv_s2 = svd.singular_values.map(|s| noise.variance() / (s * s));
    let covariance = vt.transpose() * DMatrix::from_diagonal(&inv_s2) * vt;
    Ok(LsEstimate {
        estimate,
        covariance,
    })
}

/// `‖V_𝒦 ĉ − f‖² / ‖f‖²`.
pub fn nmse(truth: &DVector<f64>, estimate_coeffs: &DVector<f64>, basis: &SpectralBasis) -> Result<f64> {
    if truth.len() != basis.n() {
        return Err(Error::DimensionMismatch {
            what: "truth signal length",
            expected: basis.n(),
            found: truth.len(),
        });
    }
    let denom = truth.norm_squared();
    if denom == 0.0 {
        return Err(Error::ZeroNormTruth);
    }
    let recon = crate::signal::synthesize(basis, estimate_coeffs)?;
    Ok((recon - truth).norm_squared() / denom)
}
