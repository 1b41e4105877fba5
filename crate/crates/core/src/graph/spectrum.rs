use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Entries below this magnitude are skipped when fixing eigenvector signs.
const SIGN_EPS: f64 = 1e-10;

/// Eigen-decomposition `L = V diag(λ) V^T` with ascending eigenvalues.
///
/// Each eigenvector is oriented so that its first entry larger than `1e-10`
/// in magnitude is positive. Vectors inside a repeated eigenvalue are still
/// basis-dependent; band selections that split such a cluster inherit that
/// ambiguity.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

pub fn spectral_decompose(laplacian: &DMatrix<f64>) -> Result<Spectrum> {
    if !laplacian.is_square() {
        return Err(Error::DimensionMismatch {
            what: "square matrix columns",
            expected: laplacian.nrows(),
            found: laplacian.ncols(),
        });
    }
    let scale = laplacian.amax().max(1.0);
    let max_asymmetry = (laplacian - laplacian.transpose()).amax();
    if max_asymmetry > 1e-10 * scale {
        return Err(Error::NotSymmetric { max_asymmetry });
    }
    let eig = SymmetricEigen::new(laplacian.clone());
    let n = laplacian.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(k).clone_owned();
        if let Some(first) = v.iter().find(|x| x.abs() > SIGN_EPS) {
            if *first < 0.0 {
                v.neg_mut();
            }
        }
        eigenvectors.set_column(col, &v);
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

impl Spectrum {
    /// Wraps an explicit eigen-pair set, e.g. a synthetic orthogonal basis.
    ///
    /// Eigenvalues must be nondecreasing and the eigenvectors orthonormal
    /// (`‖VᵀV − I‖₂ ≤ 1e-10`).
    pub fn from_parts(eigenvalues: DVector<f64>, eigenvectors: DMatrix<f64>) -> Result<Self> {
        let n = eigenvalues.len();
        if eigenvectors.shape() != (n, n) {
            return Err(Error::DimensionMismatch {
                what: "eigenvector matrix order",
                expected: n,
                found: eigenvectors.nrows(),
            });
        }
        if eigenvalues.as_slice().windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidArgument("eigenvalues must be nondecreasing".into()));
        }
        let defect = (eigenvectors.tr_mul(&eigenvectors) - DMatrix::<f64>::identity(n, n))
            .singular_values()
            .max();
        if defect > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "eigenvectors are not orthonormal (defect {defect:e})"
            )));
        }
        Ok(Spectrum {
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// Columns are the graph Fourier basis vectors.
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    /// Graph Fourier transform `V^T f`.
    pub fn gft(&self, signal: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_len(signal)?;
        Ok(self.eigenvectors.tr_mul(signal))
    }

    /// Inverse transform `V f̂`.
    pub fn igft(&self, coefficients: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_len(coefficients)?;
        Ok(&self.eigenvectors * coefficients)
    }

    fn check_len(&self, v: &DVector<f64>) -> Result<()> {
        if v.len() != self.n() {
            return Err(Error::DimensionMismatch {
                what: "signal length",
                expected: self.n(),
                found: v.len(),
            });
        }
        Ok(())
    }

    pub fn with_band(self, band: Band) -> Result<SpectralBasis> {
        SpectralBasis::new(self, band)
    }
}

/// Ordered set of distinct 0-based eigenvector indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Band(Vec<usize>);

impl Band {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidBand("band must not be empty".into()));
        }
        let mut sorted = indices.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidBand(format!("repeated index in {indices:?}")));
        }
        Ok(Band(indices))
    }

    /// Builds a band from 1-based frequency indices, as used in files and on
    /// the command line (`10,20,30` selects `v_10, v_20, v_30`).
    pub fn from_one_based(indices: &[usize]) -> Result<Self> {
        if indices.contains(&0) {
            return Err(Error::InvalidBand("1-based band index 0".into()));
        }
        Band::new(indices.iter().map(|k| k - 1).collect())
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|k| k + 1).collect()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A spectrum together with the band `𝒦` and the `N×K` matrix `V_𝒦`.
///
/// Row `i` of `V_𝒦` is written `u_i` throughout the crate.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBasis {
    spectrum: Spectrum,
    band: Band,
    band_vectors: DMatrix<f64>,
}

impl SpectralBasis {
    pub fn new(spectrum: Spectrum, band: Band) -> Result<Self> {
        let n = spectrum.n();
        if let Some(&bad) = band.indices().iter().find(|&&k| k >= n) {
            return Err(Error::InvalidBand(format!(
                "index {} out of range for {n} eigenvectors",
                bad + 1
            )));
        }
        let mut band_vectors = DMatrix::zeros(n, band.len());
        for (col, &k) in band.indices().iter().enumerate() {
            band_vectors.set_column(col, &spectrum.eigenvectors.column(k));
        }
        Ok(SpectralBasis {
            spectrum,
            band,
            band_vectors,
        })
    }

    pub fn n(&self) -> usize {
        self.spectrum.n()
    }

    pub fn k(&self) -> usize {
        self.band.len()
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn band(&self) -> &Band {
        &self.band
    }

    /// `V_𝒦`, the band eigenvectors as columns.
    pub fn band_vectors(&self) -> &DMatrix<f64> {
        &self.band_vectors
    }

    /// `u_i`, row `i` of `V_𝒦` as a column vector.
    pub fn row(&self, i: usize) -> DVector<f64> {
        self.band_vectors.row(i).transpose()
    }

    pub fn gft(&self, signal: &DVector<f64>) -> Result<DVector<f64>> {
        self.spectrum.gft(signal)
    }

    pub fn igft(&self, coefficients: &DVector<f64>) -> Result<DVector<f64>> {
        self.spectrum.igft(coefficients)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, Graph};

    #[test]
    fn path_spectrum() {
        let g = Graph::new(2, vec![Edge { i: 0, j: 1, w: 1.0 }]).unwrap();
        let s = spectral_decompose(&g.laplacian()).unwrap();
        assert!(s.eigenvalues()[0].abs() < 1e-14);
        assert!((s.eigenvalues()[1] - 2.0).abs() < 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.eigenvectors()[(0, 0)] - h).abs() < 1e-14);
        assert!((s.eigenvectors()[(1, 0)] - h).abs() < 1e-14);
    }

    #[test]
    fn complete_graph_spectrum() {
        let g = Graph::new(
            3,
            vec![
                Edge { i: 0, j: 1, w: 1.0 },
                Edge { i: 1, j: 2, w: 1.0 },
                Edge { i: 0, j: 2, w: 1.0 },
            ],
        )
        .unwrap();
        let s = spectral_decompose(&g.laplacian()).unwrap();
        let ev = s.eigenvalues();
        assert!(ev[0].abs() < 1e-12);
        assert!((ev[1] - 3.0).abs() < 1e-12);
        assert!((ev[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_asymmetric_input() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -0.5, 1.0]);
        assert!(matches!(spectral_decompose(&m), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn gft_of_eigenvector_is_unit_vector() {
        let g = Graph::new(
            4,
            vec![
                Edge { i: 0, j: 1, w: 1.0 },
                Edge { i: 1, j: 2, w: 2.0 },
                Edge { i: 2, j: 3, w: 0.5 },
            ],
        )
        .unwrap();
        let s = spectral_decompose(&g.laplacian()).unwrap();
        for k in 0..4 {
            let c = s.gft(&s.eigenvectors().column(k).clone_owned()).unwrap();
            for j in 0..4 {
                let expected = if j == k { 1.0 } else { 0.0 };
                assert!((c[j] - expected).abs() < 1e-12);
            }
        }
        // constant signal lives entirely in the first coefficient
        let c = s.gft(&DVector::from_element(4, 1.0)).unwrap();
        assert!((c[0] - 2.0).abs() < 1e-12);
        assert!(c.rows(1, 3).amax() < 1e-12);
        assert!(s.gft(&DVector::zeros(3)).is_err());
    }

    #[test]
    fn band_validation() {
        assert!(Band::new(vec![]).is_err());
        assert!(Band::new(vec![1, 1]).is_err());
        assert!(Band::from_one_based(&[0, 2]).is_err());
        assert_eq!(Band::from_one_based(&[10, 20, 30]).unwrap().indices(), &[9, 19, 29]);
        let g = Graph::new(2, vec![Edge { i: 0, j: 1, w: 1.0 }]).unwrap();
        let s = spectral_decompose(&g.laplacian()).unwrap();
        assert!(matches!(
            s.with_band(Band::new(vec![2]).unwrap()),
            Err(Error::InvalidBand(_))
        ));
    }
}
