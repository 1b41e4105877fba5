//! Coherence-based designs and greedy sequential selection.

use nalgebra::DVector;

use super::DesignProblem;
use crate::error::Result;
use crate::estimation::Design;
use crate::graph::SpectralBasis;
use crate::signal::{GaussianPrior, SampleSet};

/// Local graph coherence design `η_i = ‖u_i‖² / K`.
pub fn nonbayesian_coherence_design(basis: &SpectralBasis, budget: usize) -> Design {
    let v = basis.band_vectors();
    let k = basis.k() as f64;
    let eta = DVector::from_iterator(basis.n(), v.row_iter().map(|r| r.norm_squared() / k));
    Design::new(eta, budget).expect("band vectors are orthonormal")
}

/// Bayesian graph coherence design
/// `η_i = Σ_k σ_k² u_{ik}² / Σ_k σ_k²`.
///
/// The numerator is the squared norm of row `i` of `V_𝒦 Σ^{1/2}`; the
/// denominator is its Frobenius norm squared, which equals `tr Σ` because
/// `V_𝒦` has orthonormal columns.
pub fn bayesian_coherence_design(
    basis: &SpectralBasis,
    prior: &GaussianPrior,
    budget: usize,
) -> Result<Design> {
    prior.check_basis(basis)?;
    let var = prior.variances();
    let total = var.sum();
    let eta = DVector::from_iterator(
        basis.n(),
        basis
            .band_vectors()
            .row_iter()
            .map(|r| r.iter().zip(var.iter()).map(|(u, s)| s * u * u).sum::<f64>() / total),
    );
    Design::new(eta, budget)
}

/// Greedy Bayesian D-optimal selection.
///
/// Each of the `M` picks takes the vertex with the largest information gain
/// `log(1 + u_iᵀ Σ_t u_i / σ_w²)` (lowest index on ties) and updates the
/// posterior covariance with the Sherman–Morrison rank-one identity. Vertices
/// may be picked repeatedly.
pub fn greedy_design(problem: &DesignProblem<'_>) -> SampleSet {
    let basis = problem.basis();
    let v = basis.band_vectors();
    let sw2 = problem.noise().variance();
    let mut cov = problem.prior().covariance();
    let mut counts = vec![0usize; basis.n()];
    for _ in 0..problem.budget() {
        let projected = v * &cov;
        let mut best = (0, f64::NEG_INFINITY);
        for i in 0..basis.n() {
            let q = projected.row(i).dot(&v.row(i));
            let gain = (q / sw2).ln_1p();
            if gain > best.1 {
                best = (i, gain);
            }
        }
        let i = best.0;
        counts[i] += 1;
        let su = projected.row(i).transpose();
        let q = su.dot(&v.row(i).transpose());
        cov -= &su * su.transpose() / (sw2 + q);
        cov = (&cov + cov.transpose()) * 0.5;
    }
    SampleSet::new(counts)
}
