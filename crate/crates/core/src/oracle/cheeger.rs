use serde::Serialize;

use super::{brute_force_k_way, brute_force_sparsest_cut, laplacian_spectrum, OracleError};
use crate::graph::Graph;

const TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheegerReport {
    pub lambda_2: f64,
    pub phi: f64,
    /// `lambda_2 / 2 <= phi`.
    pub lower_ok: bool,
    /// `phi <= sqrt(2 lambda_2)`.
    pub upper_ok: bool,
    pub k: Option<usize>,
    pub lambda_k: Option<f64>,
    pub phi_k: Option<f64>,
    /// `lambda_k / 2 <= phi_k`.
    pub higher_lower_ok: Option<bool>,
    /// `phi_k <= k^2 sqrt(lambda_k)`, i.e. the higher-order bound with unit constant.
    pub higher_upper_ok: Option<bool>,
}

impl CheegerReport {
    pub fn ok(&self) -> bool {
        self.lower_ok && self.upper_ok && self.higher_lower_ok.unwrap_or(true)
    }
}

/// Both Cheeger sandwiches from the dense spectrum and the brute-force cuts,
/// with tolerance `1e-9`.
pub fn cheeger_check(g: &Graph, k: Option<usize>) -> Result<CheegerReport, OracleError> {
    let spectrum = laplacian_spectrum(g, false)?;
    let (_, phi) = brute_force_sparsest_cut(g)?;
    let lambda_2 = spectrum.lambda(2);
    let mut report = CheegerReport {
        lambda_2,
        phi,
        lower_ok: lambda_2 / 2.0 <= phi + TOL,
        upper_ok: phi <= (2.0 * lambda_2).sqrt() + TOL,
        k: None,
        lambda_k: None,
        phi_k: None,
        higher_lower_ok: None,
        higher_upper_ok: None,
    };
    if let Some(k) = k {
        let phi_k = brute_force_k_way(g, k)?;
        let lambda_k = spectrum.lambda(k);
        report.k = Some(k);
        report.lambda_k = Some(lambda_k);
        report.phi_k = Some(phi_k);
        report.higher_lower_ok = Some(lambda_k / 2.0 <= phi_k + TOL);
        report.higher_upper_ok = Some(phi_k <= (k * k) as f64 * lambda_k.max(0.0).sqrt() + TOL);
    }
    Ok(report)
}

/// Empirical constant in `D <= C k ln n / phi_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiameterBound {
    pub diameter: usize,
    pub phi_k: f64,
    pub k: usize,
    /// `D phi_k / (k ln n)`, the smallest admissible `C`.
    pub ratio: f64,
}

impl DiameterBound {
    pub fn from_parts(g: &Graph, k: usize, phi_k: f64) -> Option<DiameterBound> {
        let diameter = g.diameter()?;
        let ratio = diameter as f64 * phi_k / (k as f64 * (g.n() as f64).ln());
        Some(DiameterBound { diameter, phi_k, k, ratio })
    }

    pub fn holds(&self, c: f64) -> bool {
        self.ratio <= c
    }
}

/// Hop diameter against brute-force `phi_k` (`k = 2` uses the plain
/// sparsest cut, which reaches larger `n`).
pub fn diameter_conductance_bound(g: &Graph, k: usize) -> Result<DiameterBound, OracleError> {
    let phi_k = if k == 2 { brute_force_sparsest_cut(g)?.1 } else { brute_force_k_way(g, k)? };
    DiameterBound::from_parts(g, k, phi_k).ok_or(OracleError::TooSmall(0))
}
