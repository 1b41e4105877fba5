//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use bdos::graph::{generate_rgg, spectral_decompose, Band, SpectralBasis};
use bdos::signal::{GaussianPrior, NoiseModel, SampleSet};
use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub const EXPERIMENT_GRAPH_SEED: u64 = 7;

pub struct Instance {
    pub basis: SpectralBasis,
    pub prior: GaussianPrior,
    pub noise: NoiseModel,
    pub budget: usize,
}

/// 64-vertex RGG (radius 0.6), band {10, 20, 30}, μ = 1,
/// Σ = diag(1, 0.5, 0.1), σ_w² = 0.5.
pub fn experiment(budget: usize) -> Instance {
    let g = generate_rgg(64, 0.6, 0.3, EXPERIMENT_GRAPH_SEED).unwrap();
    let basis = spectral_decompose(&g.laplacian())
        .unwrap()
        .with_band(Band::from_one_based(&[10, 20, 30]).unwrap())
        .unwrap();
    Instance {
        basis,
        prior: GaussianPrior::new(vec![1.0; 3], vec![1.0, 0.5, 0.1]).unwrap(),
        noise: NoiseModel::new(0.5).unwrap(),
        budget,
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random RGG-based instance with `n` in `n_range`, `K ≤ min(k_max, n)`.
pub fn random_instance(rng: &mut ChaCha8Rng, n_range: std::ops::RangeInclusive<usize>, k_max: usize) -> Instance {
    let n = rng.random_range(n_range);
    let g = generate_rgg(n, 0.8, 0.4, rng.random()).unwrap();
    let k = rng.random_range(1..=k_max.min(n));
    let band = sample(rng, n, k).into_vec();
    let basis = spectral_decompose(&g.laplacian())
        .unwrap()
        .with_band(Band::new(band).unwrap())
        .unwrap();
    let mean: Vec<f64> = (0..k).map(|_| rng.random_range(-2.0..2.0)).collect();
    let variances: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..2.0)).collect();
    Instance {
        basis,
        prior: GaussianPrior::new(mean, variances).unwrap(),
        noise: NoiseModel::new(rng.random_range(0.05..2.0)).unwrap(),
        budget: rng.random_range(1..=12),
    }
}

/// Point in the simplex interior, with a heavy tail of small entries.
pub fn random_simplex(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    let raw = DVector::from_fn(n, |_, _| {
        let u: f64 = rng.random_range(1e-3..1.0);
        -u.ln()
    });
    let s = raw.sum();
    raw / s
}

/// Random counts summing to `m`.
pub fn random_counts(rng: &mut ChaCha8Rng, n: usize, m: usize) -> SampleSet {
    let mut counts = vec![0; n];
    for _ in 0..m {
        counts[rng.random_range(0..n)] += 1;
    }
    SampleSet::new(counts)
}

/// Conditional covariance and mean of `f̂` given `y = Ψ V f̂ + w`, from the
/// joint Gaussian covariance blocks.
pub fn conditional_gaussian(
    v: &DMatrix<f64>,
    samples: &SampleSet,
    mean: &DVector<f64>,
    variances: &DVector<f64>,
    noise_variance: f64,
    y: &DVector<f64>,
) -> (DVector<f64>, DMatrix<f64>) {
    let seq = samples.sequence();
    let m = seq.len();
    let k = v.ncols();
    let mut psi_v = DMatrix::zeros(m, k);
    for (t, &i) in seq.iter().enumerate() {
        psi_v.set_row(t, &v.row(i));
    }
    let sigma = DMatrix::from_diagonal(variances);
    let c_ff = sigma.clone();
    let c_fy = &sigma * psi_v.transpose();
    let c_yy = &psi_v * &sigma * psi_v.transpose() + DMatrix::identity(m, m) * noise_variance;
    let lu = c_yy.lu();
    let gain = lu.solve(&c_fy.transpose()).unwrap().transpose();
    let cov = c_ff - &gain * c_fy.transpose();
    let post_mean = mean + &gain * (y - &psi_v * mean);
    (post_mean, cov)
}

pub fn rel_err(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

/// Centers and radii of the Gershgorin discs of a square matrix.
pub fn gershgorin(m: &DMatrix<f64>) -> (Vec<f64>, Vec<f64>) {
    let n = m.nrows();
    let centers = (0..n).map(|i| m[(i, i)]).collect();
    let radii = (0..n)
        .map(|i| (0..n).filter(|&j| j != i).map(|j| m[(i, j)].abs()).sum())
        .collect();
    (centers, radii)
}

/// Smallest over eigenvalues of the distance inside the nearest disc
/// (negative when an eigenvalue lies outside every disc).
pub fn disc_slack(m: &DMatrix<f64>) -> f64 {
    let (c, r) = gershgorin(m);
    let ev = m.clone().symmetric_eigen().eigenvalues;
    ev.iter()
        .map(|l| {
            c.iter()
                .zip(&r)
                .map(|(c, r)| r - (l - c).abs())
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

/// All nonnegative integer vectors of length `n` summing to `m`.
pub fn compositions(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, m: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n - 1 {
            prefix.push(m);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for c in 0..=m {
            prefix.push(c);
            rec(n, m - c, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, m, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Direct `U1 = ½ log det(Σ Σ*⁻¹)`-style oracle: expected information gain
/// `½ log det(I + Σ V^T Ψ^T Ψ V / σ_w²)` for integer counts.
pub fn information_gain(v: &DMatrix<f64>, counts: &[usize], variances: &DVector<f64>, noise_variance: f64) -> f64 {
    let k = v.ncols();
    let mut gram = DMatrix::zeros(k, k);
    for (i, &c) in counts.iter().enumerate() {
        if c > 0 {
            let row = v.row(i).transpose();
            gram += &row * row.transpose() * c as f64;
        }
    }
    let m = DMatrix::identity(k, k) + DMatrix::from_diagonal(variances) * gram / noise_variance;
    0.5 * m.determinant().ln()
}
