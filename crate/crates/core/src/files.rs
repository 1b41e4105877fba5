//! Text formats shared by the CLI: prior files and design files (TOML).

use std::path::{Path, PathBuf};

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Band, Graph};
use crate::signal::{GaussianPrior, NoiseModel};

/// `band = [..]` (1-based), `mean = [..]`, `variances = [..]`,
/// `noise_variance = <real>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorFile {
    pub band: Vec<usize>,
    pub mean: Vec<f64>,
    pub variances: Vec<f64>,
    pub noise_variance: f64,
}

impl PriorFile {
    pub fn band(&self) -> Result<Band> {
        Band::from_one_based(&self.band)
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

    pub fn noise(&self) -> Result<NoiseModel> {
        NoiseModel::new(self.noise_variance)
    }
}

/// Output of the `design` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignFile {
    pub method: String,
    pub budget: usize,
    pub objective_kind: String,
    pub objective: f64,
    pub gap: f64,
    pub iterations: usize,
    pub seed: u64,
    pub eta: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Output of the `estimate` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateFile {
    pub estimator: String,
    pub seed: u64,
    pub budget: usize,
    pub nmse: f64,
    pub truth: Vec<f64>,
    pub estimate: Vec<f64>,
    pub counts: Vec<usize>,
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_toml<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_text(path)?;
    toml::from_str(&text).map_err(|e| Error::Format {
        path: PathBuf::from(path),
        message: e.to_string(),
    })
}

pub fn to_toml<T: Serialize>(value: &T) -> Result<String> {
    toml::to_string(value).map_err(|e| Error::InvalidArgument(format!("cannot serialize: {e}")))
}

pub fn read_graph(path: &Path) -> Result<Graph> {
    Graph::parse(&read_text(path)?).map_err(|e| Error::Format {
        path: PathBuf::from(path),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prior_file_parses() {
        let text = "band = [10, 20, 30]\nmean = [1.0, 1.0, 1.0]\nvariances = [1.0, 0.5, 0.1]\nnoise_variance = 0.5\n";
        let p: PriorFile = toml::from_str(text).unwrap();
        assert_eq!(p.band().unwrap().indices(), &[9, 19, 29]);
        assert_eq!(p.prior().unwrap().variances()[2], 0.1);
        assert_eq!(p.noise().unwrap().variance(), 0.5);
        assert!(toml::from_str::<PriorFile>("band = [1]\nmean = [0.0]\nvariances = [1.0]\nnoise_variance = 1.0\nextra = 1\n").is_err());
        let short = PriorFile {
            band: vec![1, 2],
            mean: vec![0.0],
            variances: vec![1.0],
            noise_variance: 1.0,
        };
        assert!(short.prior().is_err());
    }

    #[test]
    fn design_file_round_trip_keeps_bits() {
        let d = DesignFile {
            method: "relaxation-u1".into(),
            budget: 10,
            objective_kind: "u1".into(),
            objective: -1.2345678901234567,
            gap: 3.3e-9,
            iterations: 12,
            seed: 4,
            eta: vec![0.1 + 0.2, 1.0 / 3.0, 1.0 - 0.3 - 1.0 / 3.0],
            counts: vec![3, 4, 3],
        };
        let text = to_toml(&d).unwrap();
        assert!(text.contains("eta = ["));
        assert_eq!(toml::from_str::<DesignFile>(&text).unwrap(), d);
    }

    #[test]
    fn missing_file_reports_path() {
        let err = read_text(Path::new("/nonexistent/bdos/graph.txt")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/bdos/graph.txt"));
    }
}
