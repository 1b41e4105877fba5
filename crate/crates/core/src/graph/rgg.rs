use rand::Rng;

use super::{Edge, Graph};
use crate::error::{Error, Result};
use crate::rng::{self, Purpose};

pub const MAX_PLACEMENT_ATTEMPTS: usize = 1000;

/// Default Gaussian kernel bandwidth, half the connection radius.
pub fn default_bandwidth(radius: f64) -> f64 {
    radius / 2.0
}

/// Random geometric graph on the unit square.
///
/// Vertices are placed uniformly in `[0,1]^2`; `i` and `j` are joined when
/// their distance `d` is at most `radius`, with weight `exp(-d^2 / (2 h^2))`.
/// Placements that leave the graph disconnected are discarded and redrawn
/// from the next placement stream, up to [`MAX_PLACEMENT_ATTEMPTS`] times.
pub fn generate_rgg(n: usize, radius: f64, bandwidth: f64, seed: u64) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("RGG needs n >= 2, got {n}")));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    if !(bandwidth.is_finite() && bandwidth > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "kernel bandwidth must be positive, got {bandwidth}"
        )));
    }
    for attempt in 0..MAX_PLACEMENT_ATTEMPTS {
        let mut rng = rng::stream(seed, Purpose::Placement, attempt as u64);
        let positions: Vec<[f64; 2]> = (0..n)
            .map(|_| [rng.random::<f64>(), rng.random::<f64>()])
            .collect();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let dx = positions[i][0] - positions[j][0];
                let dy = positions[i][1] - positions[j][1];
                let d2 = dx * dx + dy * dy;
                if d2.sqrt() <= radius {
                    let w = (-d2 / (2.0 * bandwidth * bandwidth)).exp();
                    if w > 0.0 {
                        edges.push(Edge { i, j, w });
                    }
                }
            }
        }
        match Graph::new(n, edges) {
            Ok(g) => return g.with_positions(positions),
            Err(Error::Disconnected { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::ConnectivityNotAchieved {
        attempts: MAX_PLACEMENT_ATTEMPTS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_per_seed() {
        let a = generate_rgg(64, 0.6, 0.3, 7).unwrap();
        let b = generate_rgg(64, 0.6, 0.3, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_text(), b.to_text());
        let c = generate_rgg(64, 0.6, 0.3, 8).unwrap();
        assert_ne!(a.positions(), c.positions());
    }

    #[test]
    fn edges_respect_radius_and_kernel() {
        let g = generate_rgg(30, 0.4, 0.2, 3).unwrap();
        let pos = g.positions().unwrap();
        let dist = |i: usize, j: usize| {
            ((pos[i][0] - pos[j][0]).powi(2) + (pos[i][1] - pos[j][1]).powi(2)).sqrt()
        };
        let w = g.adjacency();
        for i in 0..30 {
            for j in i + 1..30 {
                let d = dist(i, j);
                if d <= 0.4 {
                    let expected = (-d * d / (2.0 * 0.04)).exp();
                    assert!((w[(i, j)] - expected).abs() < 1e-15);
                } else {
                    assert_eq!(w[(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn large_radius_gives_complete_graph() {
        let n = 12;
        let g = generate_rgg(n, 2f64.sqrt() * 1.01, 0.5, 11).unwrap();
        assert_eq!(g.edges().len(), n * (n - 1) / 2);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(generate_rgg(1, 0.6, 0.3, 0).is_err());
        assert!(generate_rgg(10, 0.0, 0.3, 0).is_err());
        assert!(generate_rgg(10, 0.6, -1.0, 0).is_err());
    }

    #[test]
    fn tiny_radius_fails_connectivity() {
        assert!(matches!(
            generate_rgg(50, 1e-6, 1e-6, 1),
            Err(Error::ConnectivityNotAchieved { .. })
        ));
    }
}
