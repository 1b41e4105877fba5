//! Bayesian design of sampling sets for bandlimited graph signals.
//!
//! A signal on an `N`-vertex graph is modeled as `f = V_𝒦 f̂_𝒦`, where `V_𝒦`
//! holds `K` Laplacian eigenvectors and `f̂_𝒦 ~ N(μ, diag(σ²))`. A design
//! `η` distributes a budget of `M` noisy samples over the vertices. The crate
//! provides:
//!
//! - [`graph`]: graphs, Laplacians, spectral bases, random geometric graphs.
//! - [`signal`]: the prior, signal synthesis, sampling and observation.
//! - [`estimation`]: MMSE and least-squares estimators, NMSE.
//! - [`design`]: D-/A-optimal utilities, a Frank–Wolfe solver for the relaxed
//!   problem, coherence heuristics, greedy selection and quantization.
//! - [`gershgorin`]: Gershgorin discs of the design Gram matrices.
//! - [`bench`]: the Monte Carlo NMSE benchmark.
//! - [`files`] and [`cli`]: file formats and the `bdos` command line.

pub mod bench;
pub mod cli;
pub mod design;
pub mod error;
pub mod estimation;
pub mod files;
pub mod gershgorin;
pub mod graph;
pub mod rng;
pub mod signal;

pub use error::{Error, Result};
