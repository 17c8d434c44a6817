//! Centralized ground truth for small graphs.

mod cheeger;
mod cuts;
mod eigen;

pub use cheeger::{cheeger_check, diameter_conductance_bound, CheegerReport, DiameterBound};
pub use cuts::{brute_force_k_way, brute_force_sparsest_cut, path_conductance, MAX_K_WAY_N, MAX_SPARSEST_CUT_N};
pub use eigen::{eigensolve_dense, Spectrum, MAX_EIGEN_N};

use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("vertex {0} has zero degree")]
    ZeroDegree(usize),
    #[error("{what} supports n <= {limit}, got {n}")]
    TooLarge { what: &'static str, n: usize, limit: usize },
    #[error("need at least two vertices, got {0}")]
    TooSmall(usize),
    #[error("k = {0} outside the supported range")]
    BadK(usize),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("eigensolver did not converge in {0} sweeps")]
    NoConvergence(usize),
}

/// Row-major dense symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseSymmetricMatrix {
    pub fn zeros(n: usize) -> DenseSymmetricMatrix {
        DenseSymmetricMatrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> DenseSymmetricMatrix {
        let mut m = DenseSymmetricMatrix::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds from a full row-major array after checking symmetry to `1e-12`.
    pub fn from_rows(n: usize, data: Vec<f64>) -> Result<DenseSymmetricMatrix, OracleError> {
        assert_eq!(data.len(), n * n, "expected {n}x{n} entries");
        let m = DenseSymmetricMatrix { n, data };
        if !m.is_symmetric(1e-12) {
            return Err(OracleError::NotSymmetric);
        }
        Ok(m)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn add_outer(&mut self, scale: f64, v: &[f64]) {
        for i in 0..self.n {
            for j in 0..self.n {
                self.data[i * self.n + j] += scale * v[i] * v[j];
            }
        }
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        self.data.chunks(self.n).map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    pub(crate) fn data(&self) -> &[f64] {
        &self.data
    }
}

/// `I - D^{-1/2} A D^{-1/2}`.
pub fn normalized_laplacian_dense(g: &Graph) -> Result<DenseSymmetricMatrix, OracleError> {
    let n = g.n();
    if let Some(v) = (0..n).find(|&v| g.degree(v) <= 0.0) {
        return Err(OracleError::ZeroDegree(v));
    }
    let s = g.sqrt_degrees();
    let mut m = DenseSymmetricMatrix::identity(n);
    for (u, v, w) in g.edges() {
        m.set(u, v, -w / (s[u] * s[v]));
    }
    Ok(m)
}

/// Spectrum of the normalized Laplacian.
pub fn laplacian_spectrum(g: &Graph, with_vectors: bool) -> Result<Spectrum, OracleError> {
    eigensolve_dense(&normalized_laplacian_dense(g)?, with_vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generators, GraphMode};

    #[test]
    fn k2_and_k3() {
        let l = normalized_laplacian_dense(&generators::clique(2).unwrap()).unwrap();
        assert_eq!(l.data(), &[1.0, -1.0, -1.0, 1.0]);
        let l3 = normalized_laplacian_dense(&generators::clique(3).unwrap()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { -0.5 };
                assert!((l3.get(i, j) - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn isolated_vertex_rejected() {
        let g = Graph::from_edges(1, [], GraphMode::Oracle).unwrap();
        assert_eq!(normalized_laplacian_dense(&g), Err(OracleError::ZeroDegree(0)));
    }

    #[test]
    fn sqrt_degree_is_null() {
        let g = generators::cycle_clique(6, 4).unwrap();
        let l = normalized_laplacian_dense(&g).unwrap();
        assert!(l.matvec(&g.sqrt_degrees()).iter().all(|x| x.abs() < 1e-12));
        assert!((l.trace() - g.n() as f64).abs() < 1e-12);
    }

    #[test]
    fn asymmetric_rows_rejected() {
        assert_eq!(DenseSymmetricMatrix::from_rows(2, vec![1.0, 2.0, 3.0, 1.0]), Err(OracleError::NotSymmetric));
    }
}
