//! Conductance estimates from eigenvalue estimates via Cheeger's inequality
//! and its higher-order form.

use serde::Serialize;
use thiserror::Error;

use crate::congest::RoundStats;
use crate::graph::Graph;
use crate::spectral::{estimate_lambda_2, estimate_smallest_k, PowerConfig, SpectralError, MAX_K};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CutError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("k = {0} out of range 2..=8")]
    BadK(usize),
    #[error("eps must lie in (0, 1), got {0}")]
    BadEps(f64),
    #[error("no guess above the floor {floor} was accepted")]
    SearchExhausted { floor: f64, trace: Vec<SearchStep> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutConfig {
    /// Seed, constants and precision; `eps` is set per guess.
    pub power: PowerConfig,
    /// Smallest guess tried; defaults to `1 / n^3`.
    pub floor: Option<f64>,
    /// Constant of the higher-order inequality `phi_k <= C k^2 sqrt(lambda_k)`.
    pub c_ho: f64,
}

impl Default for CutConfig {
    fn default() -> Self {
        CutConfig { power: PowerConfig::default(), floor: None, c_ho: 1.0 }
    }
}

impl CutConfig {
    pub fn with_seed(seed: u64) -> CutConfig {
        CutConfig { power: PowerConfig::default().with_seed(seed), ..CutConfig::default() }
    }

    fn floor_for(&self, n: usize) -> f64 {
        self.floor.unwrap_or_else(|| 1.0 / (n as f64).powi(3))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchStep {
    pub guess: f64,
    pub eps: f64,
    pub lambda: f64,
    pub phi_tilde: f64,
    pub accepted: bool,
    pub early_exit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutEstimate {
    pub phi_tilde: f64,
    pub k: usize,
    pub lambda_used: f64,
    /// Interval certified to contain the true (k-way) conductance when the
    /// eigenvalue estimate meets its guarantee. `phi_tilde` is its upper end.
    pub guarantee: (f64, f64),
    pub stats: RoundStats,
    pub search_trace: Vec<SearchStep>,
    /// The search reached the floor without accepting a guess.
    pub exhausted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutSummary {
    pub phi_tilde: f64,
    pub k: usize,
    pub lambda_used: f64,
    pub guarantee: [f64; 2],
    pub search_trace: Vec<SearchStep>,
    pub rounds_total: u64,
}

impl CutEstimate {
    pub fn summary(&self) -> CutSummary {
        CutSummary {
            phi_tilde: self.phi_tilde,
            k: self.k,
            lambda_used: self.lambda_used,
            guarantee: [self.guarantee.0, self.guarantee.1],
            search_trace: self.search_trace.clone(),
            rounds_total: self.stats.rounds,
        }
    }
}

fn cheeger_interval(lambda: f64, slack: f64) -> (f64, f64) {
    (((lambda - slack) / 2.0).max(0.0), (2.0 * lambda.max(0.0)).sqrt())
}

/// Exponential search over `phi_g = 1/2, 1/4, ...`: with `delta = 0.005 phi_g`
/// compute `lambda~_2` and `phi~ = sqrt(2 lambda~_2)`, stopping at the first
/// guess with `phi~ >= phi_g`.
pub fn estimate_sparsest_cut(g: &Graph, cfg: &CutConfig) -> Result<CutEstimate, CutError> {
    let floor = cfg.floor_for(g.n());
    let mut stats = RoundStats::default();
    let mut trace = Vec::new();
    let mut guess = 0.5;
    while guess >= floor {
        let delta = 0.005 * guess;
        let power = PowerConfig { eps: delta, ..cfg.power.clone() };
        let est = estimate_lambda_2(g, &power)?;
        stats.absorb(&est.stats);
        let phi_tilde = (2.0 * est.value.max(0.0)).sqrt();
        let accepted = phi_tilde >= guess;
        trace.push(SearchStep {
            guess,
            eps: delta,
            lambda: est.value,
            phi_tilde,
            accepted,
            early_exit: est.early_exit,
        });
        if accepted {
            return Ok(CutEstimate {
                phi_tilde,
                k: 2,
                lambda_used: est.value,
                guarantee: cheeger_interval(est.value, delta),
                stats,
                search_trace: trace,
                exhausted: false,
            });
        }
        guess /= 2.0;
    }
    Err(CutError::SearchExhausted { floor, trace })
}

/// One `lambda~_2` call at accuracy `eps^2 / 2`; `phi~ = sqrt(2 lambda~_2)`
/// lies in `[phi, sqrt(2 phi) + eps]` with high probability.
pub fn estimate_sparsest_cut_additive(g: &Graph, eps: f64, cfg: &CutConfig) -> Result<CutEstimate, CutError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(CutError::BadEps(eps));
    }
    let delta = eps * eps / 2.0;
    let power = PowerConfig { eps: delta, ..cfg.power.clone() };
    let est = estimate_lambda_2(g, &power)?;
    let phi_tilde = (2.0 * est.value.max(0.0)).sqrt();
    Ok(CutEstimate {
        phi_tilde,
        k: 2,
        lambda_used: est.value,
        guarantee: cheeger_interval(est.value, delta),
        stats: est.stats,
        search_trace: vec![SearchStep {
            guess: eps,
            eps: delta,
            lambda: est.value,
            phi_tilde,
            accepted: true,
            early_exit: est.early_exit,
        }],
        exhausted: false,
    })
}

/// Exponential search over `phi_k` guesses `g` with `eps = g`. A guess is
/// accepted once `lambda~_k >= 3 g`, which certifies `eps <= lambda_k / 2 <=
/// phi_k`. Output is `C k^2 sqrt(lambda~_k + eps)`. If the floor is reached
/// the last estimate is returned with `exhausted` set.
pub fn estimate_k_way(g: &Graph, k: usize, cfg: &CutConfig) -> Result<CutEstimate, CutError> {
    if !(2..=MAX_K).contains(&k) || k > g.n() {
        return Err(CutError::BadK(k));
    }
    let floor = cfg.floor_for(g.n());
    let scale = cfg.c_ho * (k * k) as f64;
    let mut stats = RoundStats::default();
    let mut trace = Vec::new();
    let mut guess = 0.5;
    loop {
        let power = PowerConfig { eps: guess, ..cfg.power.clone() };
        let est = estimate_smallest_k(g, k, &power)?;
        let last = &est[k - 1];
        stats.absorb(&last.stats);
        let lambda = last.value;
        let phi_tilde = scale * (lambda.max(0.0) + guess).sqrt();
        let accepted = lambda >= 3.0 * guess;
        trace.push(SearchStep { guess, eps: guess, lambda, phi_tilde, accepted, early_exit: last.early_exit });
        let next = guess / 2.0;
        if accepted || next < floor {
            return Ok(CutEstimate {
                phi_tilde,
                k,
                lambda_used: lambda,
                guarantee: (((lambda - guess) / 2.0).max(0.0), phi_tilde),
                stats,
                search_trace: trace,
                exhausted: !accepted,
            });
        }
        guess = next;
    }
}
