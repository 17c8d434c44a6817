use super::{DenseSymmetricMatrix, OracleError};

pub const MAX_EIGEN_N: usize = 512;
const MAX_SWEEPS: usize = 100;
const OFF_TOLERANCE: f64 = 1e-12;

/// Eigenvalues in ascending order, with matching unit eigenvectors if requested.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Option<Vec<Vec<f64>>>,
}

impl Spectrum {
    /// `i`-th smallest eigenvalue, 1-based.
    pub fn lambda(&self, i: usize) -> f64 {
        self.values[i - 1]
    }

    pub fn largest(&self) -> f64 {
        *self.values.last().expect("empty spectrum")
    }

    pub fn vector(&self, i: usize) -> Option<&[f64]> {
        self.vectors.as_ref().map(|v| v[i - 1].as_slice())
    }
}

fn off_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
/// `1e-12` times `max(1, ||A||_F)`.
pub fn eigensolve_dense(m: &DenseSymmetricMatrix, with_vectors: bool) -> Result<Spectrum, OracleError> {
    let n = m.order();
    if n > MAX_EIGEN_N {
        return Err(OracleError::TooLarge { what: "eigensolve_dense", n, limit: MAX_EIGEN_N });
    }
    if !m.is_symmetric(1e-12) {
        return Err(OracleError::NotSymmetric);
    }
    let mut a = m.data().to_vec();
    let mut v = if with_vectors { DenseSymmetricMatrix::identity(n).data().to_vec() } else { Vec::new() };
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
    let threshold = OFF_TOLERANCE * scale;
    let mut converged = off_norm(&a, n) <= threshold;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(OracleError::NoConvergence(MAX_SWEEPS));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                if with_vectors {
                    for k in 0..n {
                        let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
        converged = off_norm(&a, n) <= threshold;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors = with_vectors.then(|| order.iter().map(|&j| (0..n).map(|k| v[k * n + j]).collect()).collect());
    Ok(Spectrum { values, vectors })
}
