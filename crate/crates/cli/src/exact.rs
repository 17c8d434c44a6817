use std::collections::BTreeMap;
use std::process::ExitCode;

use congest_spectral::graph::GraphMode;
use congest_spectral::oracle::{brute_force_k_way, brute_force_sparsest_cut, cheeger_check, laplacian_spectrum};
use serde::Serialize;

use crate::{input, output};

#[derive(Debug, Serialize)]
struct ExactReport {
    n: usize,
    m: usize,
    lambda: Option<Vec<f64>>,
    phi: Option<f64>,
    /// Members of the lexicographically first minimizing side.
    phi_cut: Option<Vec<usize>>,
    phi_k: BTreeMap<String, f64>,
    cheeger_ok: Option<bool>,
    errors: Vec<String>,
}

/// Prints whatever the oracles can compute; exits with 1 if any part failed.
pub fn run(source: &str, k: Option<usize>) -> anyhow::Result<ExitCode> {
    let g = input::load(source, GraphMode::Oracle)?;
    let mut errors = Vec::new();
    let lambda = laplacian_spectrum(&g, false).map(|s| s.values).map_err(|e| errors.push(e.to_string())).ok();
    let cut = brute_force_sparsest_cut(&g).map_err(|e| errors.push(e.to_string())).ok();
    let mut phi_k = BTreeMap::new();
    if let Some(k) = k {
        for j in 2..=k {
            match brute_force_k_way(&g, j) {
                Ok(v) => {
                    phi_k.insert(j.to_string(), v);
                }
                Err(e) => {
                    errors.push(e.to_string());
                    break;
                }
            }
        }
    }
    let cheeger_ok = if lambda.is_some() && cut.is_some() && (k.is_none() || phi_k.len() + 1 == k.unwrap_or(1)) {
        cheeger_check(&g, k.filter(|&k| k >= 2)).map(|r| r.ok()).map_err(|e| errors.push(e.to_string())).ok()
    } else {
        None
    };
    let report = ExactReport {
        n: g.n(),
        m: g.edge_count(),
        lambda,
        phi: cut.as_ref().map(|c| c.1),
        phi_cut: cut.map(|c| c.0.members().to_vec()),
        phi_k,
        cheeger_ok,
        errors,
    };
    output::print_json(&output::to_json(&report)?)?;
    Ok(if report.errors.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
