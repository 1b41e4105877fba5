//! Weighted undirected graphs, their Laplacian, and the plain-text graph file.

mod rgg;
mod spectrum;

use std::fmt::Write as _;

use nalgebra::DMatrix;
use petgraph::algo::connected_components;
use petgraph::graph::UnGraph;

use crate::error::{Error, Result};

pub use rgg::{default_bandwidth, generate_rgg, MAX_PLACEMENT_ATTEMPTS};
pub use spectrum::{spectral_decompose, Band, SpectralBasis, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub w: f64,
}

/// Connected, undirected graph with strictly positive edge weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    positions: Option<Vec<[f64; 2]>>,
}

impl Graph {
    /// Validates the edge list and rejects disconnected graphs.
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph must have at least one vertex".into()));
        }
        let mut seen = std::collections::HashSet::with_capacity(edges.len());
        for e in &edges {
            if e.i >= n || e.j >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) out of range for n = {n}",
                    e.i, e.j
                )));
            }
            if e.i == e.j {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {}", e.i)));
            }
            if !(e.w.is_finite() && e.w > 0.0) {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) has non-positive weight {}",
                    e.i, e.j, e.w
                )));
            }
            if !seen.insert((e.i.min(e.j), e.i.max(e.j))) {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) listed twice",
                    e.i, e.j
                )));
            }
        }
        let graph = Graph {
            n,
            edges,
            positions: None,
        };
        let components = graph.component_count();
        if components > 1 {
            return Err(Error::Disconnected { components });
        }
        Ok(graph)
    }

    pub fn with_positions(mut self, positions: Vec<[f64; 2]>) -> Result<Self> {
        if positions.len() != self.n {
            return Err(Error::DimensionMismatch {
                what: "vertex positions",
                expected: self.n,
                found: positions.len(),
            });
        }
        self.positions = Some(positions);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn positions(&self) -> Option<&[[f64; 2]]> {
        self.positions.as_deref()
    }

    fn component_count(&self) -> usize {
        let mut g = UnGraph::<(), ()>::with_capacity(self.n, self.edges.len());
        for _ in 0..self.n {
            g.add_node(());
        }
        for e in &self.edges {
            g.add_edge((e.i as u32).into(), (e.j as u32).into(), ());
        }
        connected_components(&g)
    }

    pub fn adjacency(&self) -> DMatrix<f64> {
        let mut w = DMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            w[(e.i, e.j)] = e.w;
            w[(e.j, e.i)] = e.w;
        }
        w
    }

    pub fn laplacian(&self) -> DMatrix<f64> {
        build_laplacian(self)
    }

    /// Serializes to the `n <N>` / `pos i x y` / `i j w` text format.
    ///
    /// Floats use the shortest representation that parses back to the same
    /// value, so a write/parse round trip is lossless.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "n {}", self.n);
        if let Some(pos) = &self.positions {
            for (i, p) in pos.iter().enumerate() {
                let _ = writeln!(out, "pos {i} {} {}", p[0], p[1]);
            }
        }
        for e in &self.edges {
            let _ = writeln!(out, "{} {} {}", e.i, e.j, e.w);
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut n = None;
        let mut edges = Vec::new();
        let mut positions: Vec<(usize, [f64; 2])> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: lineno + 1,
                message,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields[0] {
                "n" => {
                    if fields.len() != 2 || n.is_some() {
                        return Err(err("expected a single `n <N>` header".into()));
                    }
                    n = Some(parse_field::<usize>(fields[1]).map_err(err)?);
                }
                "pos" => {
                    if fields.len() != 4 {
                        return Err(err("expected `pos <i> <x> <y>`".into()));
                    }
                    let i = parse_field::<usize>(fields[1]).map_err(err)?;
                    let x = parse_field::<f64>(fields[2]).map_err(err)?;
                    let y = parse_field::<f64>(fields[3]).map_err(err)?;
                    positions.push((i, [x, y]));
                }
                _ => {
                    if n.is_none() {
                        return Err(err("edge line before `n <N>` header".into()));
                    }
                    if fields.len() != 3 {
                        return Err(err("expected `<i> <j> <w>`".into()));
                    }
                    edges.push(Edge {
                        i: parse_field(fields[0]).map_err(err)?,
                        j: parse_field(fields[1]).map_err(err)?,
                        w: parse_field(fields[2]).map_err(err)?,
                    });
                }
            }
        }
        let n = n.ok_or(Error::Parse {
            line: 0,
            message: "missing `n <N>` header".into(),
        })?;
        let graph = Graph::new(n, edges)?;
        if positions.is_empty() {
            return Ok(graph);
        }
        let mut pos = vec![None; n];
        for (i, p) in positions {
            if i >= n || pos[i].is_some() {
                return Err(Error::InvalidGraph(format!("bad or repeated position index {i}")));
            }
            pos[i] = Some(p);
        }
        let pos = pos
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::InvalidGraph("positions missing for some vertices".into()))?;
        graph.with_positions(pos)
    }
}

fn parse_field<T: std::str::FromStr>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|_| format!("cannot parse `{s}`"))
}

/// `L = D - W` with `D = diag(W 1)`.
pub fn build_laplacian(graph: &Graph) -> DMatrix<f64> {
    let mut l = DMatrix::zeros(graph.n, graph.n);
    for e in &graph.edges {
        l[(e.i, e.j)] -= e.w;
        l[(e.j, e.i)] -= e.w;
        l[(e.i, e.i)] += e.w;
        l[(e.j, e.j)] += e.w;
    }
    l
}
