//! Gershgorin discs of the `N×N` design Gram matrices
//!
//! ```text
//! G_nB(η) = M diag(η)^{1/2} V_𝒦 V_𝒦ᵀ diag(η)^{1/2}
//! G_B(η)  = M diag(η)^{1/2} V_𝒦 Σ V_𝒦ᵀ diag(η)^{1/2} + σ_w² I
//! ```
//!
//! and checks of the spectral identities that tie them to the `K×K`
//! information matrices.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::estimation::{information_matrix, weighted_gram, Design};
use crate::graph::SpectralBasis;
use crate::signal::{GaussianPrior, NoiseModel};

/// Containment slack below this is a violation.
pub const CONTAINMENT_TOL: f64 = 1e-9;
/// Tolerance for spectrum and log-determinant identities.
pub const IDENTITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscLabel {
    /// `V_𝒦 V_𝒦ᵀ`
    UniformNonBayesian,
    /// `V_𝒦 Σ V_𝒦ᵀ`
    UniformBayesian,
    /// `G_nB(η)`
    DesignedNonBayesian,
    /// `G_B(η)`
    DesignedBayesian,
}

impl DiscLabel {
    pub fn name(self) -> &'static str {
        match self {
            DiscLabel::UniformNonBayesian => "uniform-nb",
            DiscLabel::UniformBayesian => "uniform-b",
            DiscLabel::DesignedNonBayesian => "designed-nb",
            DiscLabel::DesignedBayesian => "designed-b",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscSet {
    pub label: DiscLabel,
    pub centers: DVector<f64>,
    pub radii: DVector<f64>,
}

impl DiscSet {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Appends `vertex center radius label` rows.
    pub fn write_rows(&self, out: &mut String) {
        for i in 0..self.len() {
            let _ = writeln!(out, "{i} {} {} {}", self.centers[i], self.radii[i], self.label.name());
        }
    }

    /// Smallest containment slack over `eigenvalues`: for each eigenvalue the
    /// best `R_i − |λ − c_i|` over discs, minimized over eigenvalues.
    /// Nonnegative slack means every eigenvalue lies in the disc union.
    pub fn containment_slack(&self, eigenvalues: &DVector<f64>) -> f64 {
        eigenvalues
            .iter()
            .map(|&lambda| {
                self.centers
                    .iter()
                    .zip(self.radii.iter())
                    .map(|(c, r)| r - (lambda - c).abs())
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Discs of `scale · S R Rᵀ S + offset·I` with `S = diag(sqrt_weights)`,
/// computed row by row from the inner products `r_iᵀ r_j`.
fn discs_from_rows(
    label: DiscLabel,
    rows: &DMatrix<f64>,
    sqrt_weights: &DVector<f64>,
    scale: f64,
    offset: f64,
) -> DiscSet {
    let n = rows.nrows();
    let mut centers = DVector::zeros(n);
    let mut radii = DVector::zeros(n);
    for i in 0..n {
        let ri = rows.row(i);
        centers[i] = scale * sqrt_weights[i].powi(2) * ri.norm_squared() + offset;
        radii[i] = scale
            * (0..n)
                .filter(|&j| j != i)
                .map(|j| (sqrt_weights[i] * sqrt_weights[j] * ri.dot(&rows.row(j))).abs())
                .sum::<f64>();
    }
    DiscSet {
        label,
        centers,
        radii,
    }
}

/// Rows `ũ_i` of `V_𝒦 Σ^{1/2}`.
fn weighted_rows(basis: &SpectralBasis, prior: &GaussianPrior) -> DMatrix<f64> {
    let mut rows = basis.band_vectors().clone();
    for (k, mut col) in rows.column_iter_mut().enumerate() {
        col *= prior.variances()[k].sqrt();
    }
    rows
}

fn sqrt_eta(design: &Design) -> DVector<f64> {
    design.eta().map(f64::sqrt)
}

/// Discs of `V_𝒦 V_𝒦ᵀ`: centers `‖u_i‖²`, radii `Σ_{j≠i} |u_iᵀu_j|`.
pub fn discs_uniform_nonbayesian(basis: &SpectralBasis) -> DiscSet {
    let ones = DVector::from_element(basis.n(), 1.0);
    discs_from_rows(DiscLabel::UniformNonBayesian, basis.band_vectors(), &ones, 1.0, 0.0)
}

/// Discs of `V_𝒦 Σ V_𝒦ᵀ`.
pub fn discs_uniform_bayesian(basis: &SpectralBasis, prior: &GaussianPrior) -> Result<DiscSet> {
    prior.check_basis(basis)?;
    let ones = DVector::from_element(basis.n(), 1.0);
    Ok(discs_from_rows(
        DiscLabel::UniformBayesian,
        &weighted_rows(basis, prior),
        &ones,
        1.0,
        0.0,
    ))
}

/// Discs of `G_nB(η)`: centers `Mη_i ‖u_i‖²`, radii
/// `M Σ_{j≠i} |√(η_iη_j) u_iᵀu_j|`.
pub fn discs_nonbayesian(basis: &SpectralBasis, design: &Design) -> DiscSet {
    discs_from_rows(
        DiscLabel::DesignedNonBayesian,
        basis.band_vectors(),
        &sqrt_eta(design),
        design.budget() as f64,
        0.0,
    )
}

/// Discs of `G_B(η)`: the non-Bayesian construction on `ũ_i`, shifted by `σ_w²`.
pub fn discs_bayesian(
    basis: &SpectralBasis,
    prior: &GaussianPrior,
    noise: &NoiseModel,
    design: &Design,
) -> Result<DiscSet> {
    prior.check_basis(basis)?;
    Ok(discs_from_rows(
        DiscLabel::DesignedBayesian,
        &weighted_rows(basis, prior),
        &sqrt_eta(design),
        design.budget() as f64,
        noise.variance(),
    ))
}

/// `G_nB(η)` assembled by matrix products.
pub fn gram_nonbayesian(basis: &SpectralBasis, design: &Design) -> DMatrix<f64> {
    let d = DMatrix::from_diagonal(&sqrt_eta(design));
    let v = basis.band_vectors();
    &d * v * v.transpose() * &d * design.budget() as f64
}

/// `G_B(η)` assembled by matrix products.
pub fn gram_bayesian(
    basis: &SpectralBasis,
    prior: &GaussianPrior,
    noise: &NoiseModel,
    design: &Design,
) -> DMatrix<f64> {
    let d = DMatrix::from_diagonal(&sqrt_eta(design));
    let v = basis.band_vectors();
    let n = basis.n();
    &d * v * prior.covariance() * v.transpose() * &d * design.budget() as f64
        + DMatrix::identity(n, n) * noise.variance()
}

fn sorted_eigenvalues_desc(m: DMatrix<f64>) -> Vec<f64> {
    let sym = (&m + m.transpose()) * 0.5;
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Eigenvalues of the Gram matrix checked against its disc union.
#[derive(Debug, Clone, PartialEq)]
pub struct Containment {
    pub label: DiscLabel,
    pub min_slack: f64,
    pub pass: bool,
}

pub fn check_containment(discs: &DiscSet, matrix: &DMatrix<f64>) -> Containment {
    let sym = (matrix + matrix.transpose()) * 0.5;
    let min_slack = discs.containment_slack(&sym.symmetric_eigenvalues());
    Containment {
        label: discs.label,
        min_slack,
        pass: min_slack >= -CONTAINMENT_TOL,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEquivalence {
    pub max_deviation: f64,
    pub pass: bool,
}

/// Compares the spectrum of the `K×K` matrix with that of the `N×N` Gram
/// matrix.
///
/// Without a prior: the `K` largest eigenvalues of `G_nB` must equal those of
/// `M V_𝒦ᵀ diag(η) V_𝒦` and the remaining `N−K` must vanish. With a prior:
/// the `K` largest eigenvalues of `G_B` must equal those of
/// `M Σ^{1/2} V_𝒦ᵀ diag(η) V_𝒦 Σ^{1/2} + σ_w² I`, the rest `σ_w²`.
pub fn nonzero_spectrum_equivalence(
    basis: &SpectralBasis,
    prior: Option<(&GaussianPrior, &NoiseModel)>,
    design: &Design,
) -> Result<SpectrumEquivalence> {
    let k = basis.k();
    let m = design.budget() as f64;
    let small_core = weighted_gram(basis, design.eta()) * m;
    let (small, big, floor) = match prior {
        None => (small_core, gram_nonbayesian(basis, design), 0.0),
        Some((prior, noise)) => {
            prior.check_basis(basis)?;
            let s = DMatrix::from_diagonal(&prior.variances().map(f64::sqrt));
            let small = &s * small_core * &s + DMatrix::identity(k, k) * noise.variance();
            (small, gram_bayesian(basis, prior, noise, design), noise.variance())
        }
    };
    let small = sorted_eigenvalues_desc(small);
    let big = sorted_eigenvalues_desc(big);
    let mut max_deviation: f64 = 0.0;
    for (i, b) in big.iter().enumerate() {
        let expected = if i < k { small[i] } else { floor };
        max_deviation = max_deviation.max((b - expected).abs());
    }
    Ok(SpectrumEquivalence {
        max_deviation,
        pass: max_deviation <= IDENTITY_TOL,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogdetCheck {
    /// `log det` of the information matrix, by Cholesky.
    pub lhs: f64,
    /// Constant term plus `Σ log λ_i` over the `K` largest Gram eigenvalues.
    pub rhs: f64,
    pub deviation: f64,
    pub pass: bool,
}

fn cholesky_logdet(m: DMatrix<f64>) -> Option<f64> {
    let chol = m.cholesky()?;
    Some(2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>())
}

/// `log det Σ*_B(η)⁻¹ = log det(σ_w⁻² Σ⁻¹) + Σ_{i≤K} log λ_i(G_B)`.
pub fn logdet_decomposition_check(
    basis: &SpectralBasis,
    prior: &GaussianPrior,
    noise: &NoiseModel,
    design: &Design,
) -> Result<LogdetCheck> {
    let info = information_matrix(basis, Some(prior), noise, design)?;
    let lhs = cholesky_logdet(info).expect("posterior precision is positive definite");
    let k = basis.k();
    let constant = -(k as f64) * noise.variance().ln() - prior.variances().iter().map(|v| v.ln()).sum::<f64>();
    let ev = sorted_eigenvalues_desc(gram_bayesian(basis, prior, noise, design));
    let rhs = constant + ev[..k].iter().map(|l| l.ln()).sum::<f64>();
    let deviation = (lhs - rhs).abs();
    Ok(LogdetCheck {
        lhs,
        rhs,
        deviation,
        pass: deviation <= IDENTITY_TOL,
    })
}

/// `log det Σ*_nB(η)⁻¹ = K log σ_w⁻² + Σ_{i≤K} log λ_i(G_nB)`; `None` when
/// the LS information matrix is singular.
pub fn nonbayesian_logdet_check(
    basis: &SpectralBasis,
    noise: &NoiseModel,
    design: &Design,
) -> Result<Option<LogdetCheck>> {
    let info = information_matrix(basis, None, noise, design)?;
    let Some(lhs) = cholesky_logdet(info) else {
        return Ok(None);
    };
    let k = basis.k();
    let ev = sorted_eigenvalues_desc(gram_nonbayesian(basis, design));
    if ev[k - 1] <= 0.0 {
        return Ok(None);
    }
    let rhs = -(k as f64) * noise.variance().ln() + ev[..k].iter().map(|l| l.ln()).sum::<f64>();
    let deviation = (lhs - rhs).abs();
    Ok(Some(LogdetCheck {
        lhs,
        rhs,
        deviation,
        pass: deviation <= IDENTITY_TOL,
    }))
}

/// The four disc sets for one design together with containment results.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscReport {
    pub sets: Vec<DiscSet>,
    pub containment: Vec<Containment>,
}

pub fn disc_report(
    basis: &SpectralBasis,
    prior: &GaussianPrior,
    noise: &NoiseModel,
    design: &Design,
) -> Result<DiscReport> {
    let v = basis.band_vectors();
    let uniform_nb = discs_uniform_nonbayesian(basis);
    let uniform_b = discs_uniform_bayesian(basis, prior)?;
    let designed_nb = discs_nonbayesian(basis, design);
    let designed_b = discs_bayesian(basis, prior, noise, design)?;
    let containment = vec![
        check_containment(&uniform_nb, &(v * v.transpose())),
        check_containment(&uniform_b, &(v * prior.covariance() * v.transpose())),
        check_containment(&designed_nb, &gram_nonbayesian(basis, design)),
        check_containment(&designed_b, &gram_bayesian(basis, prior, noise, design)),
    ];
    Ok(DiscReport {
        sets: vec![uniform_nb, uniform_b, designed_nb, designed_b],
        containment,
    })
}

impl DiscReport {
    /// Header, one row per disc, and `# containment` footer lines.
    pub fn to_table(&self) -> String {
        let mut out = String::from("vertex center radius label\n");
        for set in &self.sets {
            set.write_rows(&mut out);
        }
        for c in &self.containment {
            let _ = writeln!(
                out,
                "# containment {} = {} (min slack {:e})",
                c.label.name(),
                if c.pass { "pass" } else { "fail" },
                c.min_slack
            );
        }
        out
    }

    pub fn all_contained(&self) -> bool {
        self.containment.iter().all(|c| c.pass)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_rgg, spectral_decompose, Band};
    use crate::rng::seeded;
    use rand::Rng;

    fn basis(n: usize, band: Vec<usize>, seed: u64) -> SpectralBasis {
        let g = generate_rgg(n, 0.6, 0.3, seed).unwrap();
        spectral_decompose(&g.laplacian())
            .unwrap()
            .with_band(Band::new(band).unwrap())
            .unwrap()
    }

    fn prior3() -> GaussianPrior {
        GaussianPrior::new(vec![1.0; 3], vec![1.0, 0.5, 0.1]).unwrap()
    }

    #[test]
    fn zero_weight_vertex_has_degenerate_disc() {
        let b = basis(12, vec![1, 4, 6], 3);
        let mut eta = DVector::from_element(12, 1.0 / 11.0);
        eta[5] = 0.0;
        let d = Design::new(eta, 10).unwrap();
        let discs = discs_nonbayesian(&b, &d);
        assert_eq!(discs.centers[5], 0.0);
        assert_eq!(discs.radii[5], 0.0);
    }

    #[test]
    fn full_band_uniform_has_zero_radii() {
        let b = basis(10, (0..10).collect(), 4);
        let d = Design::uniform(10, 20);
        let discs = discs_nonbayesian(&b, &d);
        for i in 0..10 {
            assert!((discs.centers[i] - 2.0).abs() < 1e-12);
            assert!(discs.radii[i] < 1e-12);
        }
    }

    #[test]
    fn zero_budget_bayesian_discs_sit_at_noise_level() {
        let b = basis(15, vec![2, 5, 8], 5);
        let noise = NoiseModel::new(0.5).unwrap();
        let d = Design::uniform(15, 0);
        let discs = discs_bayesian(&b, &prior3(), &noise, &d).unwrap();
        assert!(discs.centers.iter().all(|&c| c == 0.5));
        assert!(discs.radii.iter().all(|&r| r == 0.0));
        let eq = nonzero_spectrum_equivalence(&b, Some((&prior3(), &noise)), &d).unwrap();
        assert!(eq.pass);
        let ld = logdet_decomposition_check(&b, &prior3(), &noise, &d).unwrap();
        assert!(ld.pass);
    }

    #[test]
    fn identity_prior_shifts_nonbayesian_discs() {
        let b = basis(15, vec![2, 5, 8], 6);
        let p = GaussianPrior::new(vec![0.0; 3], vec![1.0; 3]).unwrap();
        let noise = NoiseModel::new(0.3).unwrap();
        let mut rng = seeded(1);
        let raw = DVector::from_fn(15, |_, _| rng.random::<f64>());
        let d = Design::new(&raw / raw.sum(), 7).unwrap();
        let nb = discs_nonbayesian(&b, &d);
        let bayes = discs_bayesian(&b, &p, &noise, &d).unwrap();
        assert!((bayes.centers - nb.centers.add_scalar(0.3)).amax() < 1e-14);
        assert!((bayes.radii - nb.radii).amax() < 1e-14);
    }

    #[test]
    fn point_mass_gives_rank_one_gram() {
        let b = basis(15, vec![2, 5, 8], 7);
        let mut eta = DVector::zeros(15);
        eta[0] = 1.0;
        let d = Design::new(eta, 10).unwrap();
        let ev = sorted_eigenvalues_desc(gram_nonbayesian(&b, &d));
        assert!((ev[0] - 10.0 * b.row(0).norm_squared()).abs() < 1e-12);
        assert!(ev[1..].iter().all(|x| x.abs() < 1e-12));
        assert!(nonzero_spectrum_equivalence(&b, None, &d).unwrap().pass);
    }

    #[test]
    fn random_designs_satisfy_all_identities() {
        let b = basis(30, vec![3, 9, 17], 8);
        let noise = NoiseModel::new(0.5).unwrap();
        let mut rng = seeded(2);
        for _ in 0..20 {
            let raw = DVector::from_fn(30, |_, _| -rng.random::<f64>().ln());
            let d = Design::new(&raw / raw.sum(), 10).unwrap();
            let report = disc_report(&b, &prior3(), &noise, &d).unwrap();
            assert!(report.all_contained());
            assert!(nonzero_spectrum_equivalence(&b, None, &d).unwrap().pass);
            assert!(nonzero_spectrum_equivalence(&b, Some((&prior3(), &noise)), &d).unwrap().pass);
            assert!(logdet_decomposition_check(&b, &prior3(), &noise, &d).unwrap().pass);
            assert!(nonbayesian_logdet_check(&b, &noise, &d).unwrap().unwrap().pass);
        }
    }

    #[test]
    fn table_layout() {
        let b = basis(6, vec![1, 2, 3], 9);
        let noise = NoiseModel::new(0.5).unwrap();
        let report = disc_report(&b, &prior3(), &noise, &Design::uniform(6, 3)).unwrap();
        let table = report.to_table();
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines[0], "vertex center radius label");
        assert_eq!(lines.len(), 1 + 4 * 6 + 4);
        assert!(lines[1].ends_with("uniform-nb"));
        assert!(lines.last().unwrap().starts_with("# containment designed-b = pass"));
    }
}
