//! Weighted undirected graphs: construction, edge-list I/O, cut arithmetic and
//! local Laplacian products.

pub mod generators;

use std::collections::VecDeque;
use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("graph has no vertices")]
    Empty,
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("edge {u}-{v} has non-positive weight {w}")]
    NonPositiveWeight { u: usize, v: usize, w: f64 },
    #[error("header declares {declared} edges, found {found}")]
    EdgeCountMismatch { declared: usize, found: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("vertex {0} has zero degree")]
    ZeroDegree(usize),
    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid cut: {0}")]
    InvalidCut(String),
}

/// Whether construction insists on a connected graph with positive degrees.
/// Distributed runs need `Strict`; the oracles also accept `Oracle` graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphMode {
    Strict,
    Oracle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    adjacency: Vec<Vec<(usize, f64)>>,
    degree: Vec<f64>,
    edge_count: usize,
    connected: bool,
}

impl Graph {
    pub fn from_edges<I>(n: usize, edges: I, mode: GraphMode) -> Result<Graph, GraphError>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut edge_count = 0;
        for (u, v, w) in edges {
            check_edge(n, u, v, w)?;
            adjacency[u].push((v, w));
            adjacency[v].push((u, w));
            edge_count += 1;
        }
        for (u, list) in adjacency.iter_mut().enumerate() {
            list.sort_by_key(|&(v, _)| v);
            if let Some(pair) = list.windows(2).find(|p| p[0].0 == p[1].0) {
                return Err(GraphError::DuplicateEdge(u.min(pair[0].0), u.max(pair[0].0)));
            }
        }
        let degree: Vec<f64> = adjacency.iter().map(|l| l.iter().map(|&(_, w)| w).sum()).collect();
        let mut g = Graph { adjacency, degree, edge_count, connected: false };
        g.connected = g.bfs_distances(0).iter().all(Option::is_some);
        if mode == GraphMode::Strict {
            if let Some(v) = g.degree.iter().position(|&d| d <= 0.0) {
                if n > 1 {
                    return Err(GraphError::Disconnected);
                }
                return Err(GraphError::ZeroDegree(v));
            }
            if !g.connected {
                return Err(GraphError::Disconnected);
            }
        }
        Ok(g)
    }

    /// Parses the edge-list format: a header `n m`, then `m` lines `u v [w]`.
    /// Blank lines and anything after `#` are ignored.
    pub fn parse_edge_list(text: &str, mode: GraphMode) -> Result<Graph, GraphError> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let fields: Vec<&str> = content.split_whitespace().collect();
            let parse_usize = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| GraphError::Parse { line, message: format!("expected integer, got {s:?}") })
            };
            match header {
                None => {
                    if fields.len() != 2 {
                        return Err(GraphError::Parse { line, message: "header must be \"n m\"".into() });
                    }
                    header = Some((parse_usize(fields[0])?, parse_usize(fields[1])?));
                }
                Some((n, _)) => {
                    if fields.len() < 2 || fields.len() > 3 {
                        return Err(GraphError::Parse { line, message: "edge line must be \"u v [w]\"".into() });
                    }
                    let u = parse_usize(fields[0])?;
                    let v = parse_usize(fields[1])?;
                    let w = match fields.get(2) {
                        Some(s) => s.parse::<f64>().map_err(|_| GraphError::Parse {
                            line,
                            message: format!("expected weight, got {s:?}"),
                        })?,
                        None => 1.0,
                    };
                    check_edge(n, u, v, w).map_err(|e| GraphError::Parse { line, message: e.to_string() })?;
                    edges.push((u, v, w));
                }
            }
        }
        let (n, m) = header.ok_or(GraphError::Parse { line: 1, message: "missing header".into() })?;
        if edges.len() != m {
            return Err(GraphError::EdgeCountMismatch { declared: m, found: edges.len() });
        }
        Graph::from_edges(n, edges, mode)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n(), self.edge_count);
        for (u, v, w) in self.edges() {
            if w == 1.0 {
                let _ = writeln!(out, "{u} {v}");
            } else {
                let _ = writeln!(out, "{u} {v} {w}");
            }
        }
        out
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> f64 {
        self.degree[v]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degree
    }

    pub fn sqrt_degrees(&self) -> Vec<f64> {
        self.degree.iter().map(|d| d.sqrt()).collect()
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        let list = &self.adjacency[u];
        list.binary_search_by_key(&v, |&(x, _)| x).ok().map(|i| list[i].1)
    }

    /// Edges with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, l)| l.iter().filter(move |&&(v, _)| v > u).map(move |&(v, w)| (u, v, w)))
    }

    pub fn total_weight(&self) -> f64 {
        self.edges().map(|(_, _, w)| w).sum()
    }

    pub fn volume(&self, vertices: &[usize]) -> f64 {
        vertices.iter().map(|&v| self.degree[v]).sum()
    }

    /// Weight of edges with exactly one endpoint in the set described by `inside`.
    pub fn cut_weight(&self, inside: &[bool]) -> f64 {
        self.edges().filter(|&(u, v, _)| inside[u] != inside[v]).map(|(_, _, w)| w).sum()
    }

    pub fn sparsity(&self, cut: &CutSet) -> f64 {
        let inside = cut.indicator(self.n());
        let vol_s: f64 = self.volume(cut.members());
        let vol_rest = 2.0 * self.total_weight() - vol_s;
        let denom = vol_s.min(vol_rest);
        if denom <= 0.0 {
            return 0.0;
        }
        self.cut_weight(&inside) / denom
    }

    /// `(2I - L) x`.
    pub fn apply_m(&self, x: &[f64]) -> Vec<f64> {
        let s = self.sqrt_degrees();
        (0..self.n())
            .map(|v| {
                let acc: f64 = self.adjacency[v].iter().map(|&(u, w)| w / (s[u] * s[v]) * x[u]).sum();
                x[v] + acc
            })
            .collect()
    }

    pub fn apply_laplacian(&self, x: &[f64]) -> Vec<f64> {
        let s = self.sqrt_degrees();
        (0..self.n())
            .map(|v| {
                let acc: f64 = self.adjacency[v].iter().map(|&(u, w)| w / (s[u] * s[v]) * x[u]).sum();
                x[v] - acc
            })
            .collect()
    }

    /// Hop distances from `src`; `None` for unreachable vertices.
    pub fn bfs_distances(&self, src: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap_or(0);
            for &(v, _) in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn eccentricity(&self, v: usize) -> Option<usize> {
        self.bfs_distances(v).into_iter().try_fold(0, |acc, d| d.map(|d| acc.max(d)))
    }

    /// Hop diameter, `None` when disconnected.
    pub fn diameter(&self) -> Option<usize> {
        (0..self.n()).try_fold(0, |acc, v| self.eccentricity(v).map(|e| acc.max(e)))
    }

    /// Vertex-disjoint union; the result is an oracle-mode graph.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let offset = self.n();
        let edges = self.edges().chain(other.edges().map(|(u, v, w)| (u + offset, v + offset, w)));
        Graph::from_edges(offset + other.n(), edges.collect::<Vec<_>>(), GraphMode::Oracle)
            .expect("union of valid graphs is valid")
    }
}

fn check_edge(n: usize, u: usize, v: usize, w: f64) -> Result<(), GraphError> {
    for x in [u, v] {
        if x >= n {
            return Err(GraphError::VertexOutOfRange { vertex: x, n });
        }
    }
    if u == v {
        return Err(GraphError::SelfLoop(u));
    }
    if w.is_nan() || w <= 0.0 || !w.is_finite() {
        return Err(GraphError::NonPositiveWeight { u, v, w });
    }
    Ok(())
}

/// A non-empty proper vertex subset, stored sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutSet {
    members: Vec<usize>,
}

impl CutSet {
    pub fn new(n: usize, mut members: Vec<usize>) -> Result<CutSet, GraphError> {
        members.sort_unstable();
        members.dedup();
        if members.is_empty() {
            return Err(GraphError::InvalidCut("empty set".into()));
        }
        if let Some(&v) = members.iter().find(|&&v| v >= n) {
            return Err(GraphError::VertexOutOfRange { vertex: v, n });
        }
        if members.len() == n {
            return Err(GraphError::InvalidCut("set is all of V".into()));
        }
        Ok(CutSet { members })
    }

    /// Bit `i` of `mask` marks vertex `i`.
    pub fn from_mask(n: usize, mask: u64) -> Result<CutSet, GraphError> {
        CutSet::new(n, (0..n.min(64)).filter(|&i| mask >> i & 1 == 1).collect())
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn complement(&self, n: usize) -> CutSet {
        let inside = self.indicator(n);
        CutSet { members: (0..n).filter(|&v| !inside[v]).collect() }
    }

    pub fn indicator(&self, n: usize) -> Vec<bool> {
        let mut inside = vec![false; n];
        for &v in &self.members {
            inside[v] = true;
        }
        inside
    }

    pub fn mask(&self) -> u64 {
        self.members.iter().fold(0u64, |m, &v| m | 1 << v)
    }
}
