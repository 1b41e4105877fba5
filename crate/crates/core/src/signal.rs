//! Gaussian prior over band coefficients, signal synthesis, and noisy sampling.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::graph::SpectralBasis;

/// Variances below this floor are raised to it so the prior stays full rank.
pub const VARIANCE_FLOOR: f64 = 1e-12;

/// `N(μ, diag(σ²))` over the band coefficients `f̂_𝒦`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPrior {
    mean: DVector<f64>,
    variances: DVector<f64>,
}

impl GaussianPrior {
    pub fn new(mean: Vec<f64>, variances: Vec<f64>) -> Result<Self> {
        if mean.len() != variances.len() {
            return Err(Error::DimensionMismatch {
                what: "prior variances",
                expected: mean.len(),
                found: variances.len(),
            });
        }
        if mean.is_empty() {
            return Err(Error::InvalidPrior("prior must have at least one coefficient".into()));
        }
        if let Some(m) = mean.iter().find(|m| !m.is_finite()) {
            return Err(Error::InvalidPrior(format!("non-finite mean {m}")));
        }
        let mut variances = variances;
        for v in variances.iter_mut() {
            if !v.is_finite() || *v < 0.0 {
                return Err(Error::InvalidPrior(format!("variance {v} is not a positive real")));
            }
            if *v < VARIANCE_FLOOR {
                log::warn!("prior variance {v} clamped to {VARIANCE_FLOOR}");
                *v = VARIANCE_FLOOR;
            }
        }
        Ok(GaussianPrior {
            mean: DVector::from_vec(mean),
            variances: DVector::from_vec(variances),
        })
    }

    pub fn k(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn variances(&self) -> &DVector<f64> {
        &self.variances
    }

    pub fn covariance(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.variances)
    }

    pub fn precision(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.variances.map(|v| 1.0 / v))
    }

    pub(crate) fn check_basis(&self, basis: &SpectralBasis) -> Result<()> {
        if self.k() != basis.k() {
            return Err(Error::DimensionMismatch {
                what: "prior length vs band size",
                expected: basis.k(),
                found: self.k(),
            });
        }
        Ok(())
    }
}

/// I.i.d. Gaussian observation noise with variance `σ_w²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    variance: f64,
}

impl NoiseModel {
    pub fn new(variance: f64) -> Result<Self> {
        if !(variance.is_finite() && variance > 0.0) {
            return Err(Error::InvalidNoise(variance));
        }
        Ok(NoiseModel { variance })
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }
}

/// Integer sample counts per vertex; vertex `i` is observed `counts[i]` times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSet {
    counts: Vec<usize>,
}

impl SampleSet {
    pub fn new(counts: Vec<usize>) -> Self {
        SampleSet { counts }
    }

    /// Counts of a sampling sequence `𝒮` over `n` vertices.
    pub fn from_sequence(n: usize, sequence: &[usize]) -> Result<Self> {
        let mut counts = vec![0; n];
        for &s in sequence {
            if s >= n {
                return Err(Error::InvalidArgument(format!("sample index {s} >= {n}")));
            }
            counts[s] += 1;
        }
        Ok(SampleSet { counts })
    }

    pub fn n(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn budget(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Vertices in ascending order, each repeated `counts[i]` times.
    pub fn sequence(&self) -> Vec<usize> {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(i, &m)| std::iter::repeat_n(i, m))
            .collect()
    }

    pub fn distinct_vertices(&self) -> usize {
        self.counts.iter().filter(|&&m| m > 0).count()
    }

    /// Sampling operator `Ψ` (`M×N`, one 1 per row).
    pub fn operator(&self) -> DMatrix<f64> {
        let seq = self.sequence();
        let mut psi = DMatrix::zeros(seq.len(), self.n());
        for (row, &col) in seq.iter().enumerate() {
            psi[(row, col)] = 1.0;
        }
        psi
    }

    pub(crate) fn check_n(&self, n: usize) -> Result<()> {
        if self.n() != n {
            return Err(Error::DimensionMismatch {
                what: "sample counts length",
                expected: n,
                found: self.n(),
            });
        }
        Ok(())
    }
}

pub fn draw_coefficients<R: Rng + ?Sized>(prior: &GaussianPrior, rng: &mut R) -> DVector<f64> {
    DVector::from_iterator(
        prior.k(),
        prior
            .mean
            .iter()
            .zip(prior.variances.iter())
            .map(|(m, v)| m + v.sqrt() * rng.sample::<f64, _>(StandardNormal)),
    )
}

/// Bandlimited signal `V_𝒦 f̂_𝒦`.
pub fn synthesize(basis: &SpectralBasis, coefficients: &DVector<f64>) -> Result<DVector<f64>> {
    if coefficients.len() != basis.k() {
        return Err(Error::DimensionMismatch {
            what: "band coefficients",
            expected: basis.k(),
            found: coefficients.len(),
        });
    }
    Ok(basis.band_vectors() * coefficients)
}

/// `y_𝒮 = Ψ f + w` with a fresh noise draw for every observation event.
///
/// Entries follow [`SampleSet::sequence`] order, so repeated visits to a
/// vertex are adjacent and carry independent noise.
pub fn observe<R: Rng + ?Sized>(
    signal: &DVector<f64>,
    samples: &SampleSet,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<DVector<f64>> {
    samples.check_n(signal.len())?;
    let sd = noise.variance.sqrt();
    let seq = samples.sequence();
    Ok(DVector::from_iterator(
        seq.len(),
        seq.iter()
            .map(|&i| signal[i] + sd * rng.sample::<f64, _>(StandardNormal)),
    ))
}
