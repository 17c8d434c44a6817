use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::Args;
use congest_spectral::congest::RoundStats;
use congest_spectral::cut::{estimate_k_way, estimate_sparsest_cut, estimate_sparsest_cut_additive, CutConfig, CutEstimate};
use congest_spectral::graph::{Graph, GraphMode};
use congest_spectral::oracle::{brute_force_k_way, brute_force_sparsest_cut, laplacian_spectrum, MAX_EIGEN_N};
use congest_spectral::spectral::{estimate_lambda_2, estimate_lambda_n, estimate_smallest_k, EigenEstimate, PowerConfig};
use serde::Serialize;
use serde_json::{json, Value};

use crate::{input, output, PowerArgs};

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Edge-list file, `-` for stdin, or `family:p1,p2`.
    pub graph: String,
    /// `lambda_n`, `lambda_2`, `lambda_k K`, `phi` or `phi_k K`.
    #[arg(long, num_args = 1..=2, required = true, value_names = ["TARGET", "K"])]
    pub target: Vec<String>,
    /// Accuracy of the eigenvalue targets. For `phi` it selects the additive
    /// variant; without it `phi` runs the exponential search.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Constant of the higher-order Cheeger bound used by `phi_k`.
    #[arg(long, default_value_t = 1.0)]
    pub c_ho: f64,
    /// Smallest conductance guess; defaults to `1 / n^3`.
    #[arg(long)]
    pub floor: Option<f64>,
    /// Attach oracle values and a sandwich check.
    #[arg(long)]
    pub oracle: bool,
    /// Add wall-clock milliseconds to the record.
    #[arg(long)]
    pub timing: bool,
    #[command(flatten)]
    pub power: PowerArgs,
}

const DEFAULT_EPS: f64 = 0.05;
const TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    LambdaN,
    Lambda2,
    LambdaK(usize),
    Phi,
    PhiK(usize),
}

impl Target {
    pub fn parse(words: &[String]) -> anyhow::Result<Target> {
        let k = || -> anyhow::Result<usize> {
            let w = words.get(1).context("this target needs K")?;
            w.parse().with_context(|| format!("bad K {w:?}"))
        };
        let plain = |t: Target| if words.len() == 1 { Ok(t) } else { bail!("{} takes no K", words[0]) };
        match words.first().map(String::as_str) {
            Some("lambda_n") => plain(Target::LambdaN),
            Some("lambda_2") => plain(Target::Lambda2),
            Some("phi") => plain(Target::Phi),
            Some("lambda_k") => Ok(Target::LambdaK(k()?)),
            Some("phi_k") => Ok(Target::PhiK(k()?)),
            other => bail!("unknown target {other:?}"),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Target::LambdaN => "lambda_n",
            Target::Lambda2 => "lambda_2",
            Target::LambdaK(_) => "lambda_k",
            Target::Phi => "phi",
            Target::PhiK(_) => "phi_k",
        }
    }

    fn k(self) -> Option<usize> {
        match self {
            Target::LambdaK(k) | Target::PhiK(k) => Some(k),
            _ => None,
        }
    }
}

#[derive(Debug, Serialize)]
struct EigenResult {
    which: String,
    value: f64,
    eps: f64,
    rounds: u64,
    max_message_bits: u32,
    total_bits: u64,
    instances: usize,
    iterations: u64,
    mantissa_bits: u32,
    early_exit: bool,
    restarts: u32,
    below_eps: bool,
}

impl From<&EigenEstimate> for EigenResult {
    fn from(e: &EigenEstimate) -> Self {
        EigenResult {
            which: e.which.label(),
            value: e.value,
            eps: e.eps,
            rounds: e.stats.rounds,
            max_message_bits: e.stats.max_message_bits,
            total_bits: e.stats.total_bits,
            instances: e.instances,
            iterations: e.iterations,
            mantissa_bits: e.mantissa_bits,
            early_exit: e.early_exit,
            restarts: e.restarts,
            below_eps: e.below_eps,
        }
    }
}

#[derive(Debug, Serialize)]
struct RunRecord {
    command: Vec<String>,
    graph: Value,
    config: Value,
    result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_ms: Option<f64>,
}

/// Outcome of one estimation, shared with `bench`.
pub enum Outcome {
    Eigen(Vec<EigenEstimate>),
    Cut(CutEstimate),
}

impl Outcome {
    pub fn stats(&self) -> RoundStats {
        match self {
            Outcome::Eigen(v) => v.last().map(|e| e.stats).unwrap_or_default(),
            Outcome::Cut(c) => c.stats,
        }
    }

    /// The headline number: the last eigenvalue or `phi~`.
    pub fn value(&self) -> f64 {
        match self {
            Outcome::Eigen(v) => v.last().map_or(f64::NAN, |e| e.value),
            Outcome::Cut(c) => c.phi_tilde,
        }
    }

    fn to_json(&self) -> anyhow::Result<Value> {
        Ok(match self {
            Outcome::Eigen(v) if v.len() == 1 => serde_json::to_value(EigenResult::from(&v[0]))?,
            Outcome::Eigen(v) => json!({ "values": v.iter().map(EigenResult::from).collect::<Vec<_>>() }),
            Outcome::Cut(c) => {
                let mut out = serde_json::to_value(c.summary())?;
                out["exhausted"] = json!(c.exhausted);
                out["max_message_bits"] = json!(c.stats.max_message_bits);
                out["total_bits"] = json!(c.stats.total_bits);
                out
            }
        })
    }
}

pub fn cut_config(power: PowerConfig, c_ho: f64, floor: Option<f64>) -> CutConfig {
    CutConfig { power, floor, c_ho }
}

pub fn execute(g: &Graph, target: Target, eps: Option<f64>, cut: &CutConfig) -> anyhow::Result<Outcome> {
    let cfg = PowerConfig { eps: eps.unwrap_or(DEFAULT_EPS), ..cut.power.clone() };
    Ok(match target {
        Target::LambdaN => Outcome::Eigen(vec![estimate_lambda_n(g, &cfg)?]),
        Target::Lambda2 => Outcome::Eigen(vec![estimate_lambda_2(g, &cfg)?]),
        Target::LambdaK(k) => Outcome::Eigen(estimate_smallest_k(g, k, &cfg)?),
        Target::Phi => Outcome::Cut(match eps {
            Some(e) => estimate_sparsest_cut_additive(g, e, cut)?,
            None => estimate_sparsest_cut(g, cut)?,
        }),
        Target::PhiK(k) => Outcome::Cut(estimate_k_way(g, k, cut)?),
    })
}

/// Exact values for the target and whether the estimate lands where its
/// guarantee says, with tolerance `1e-6`.
pub fn oracle_check(g: &Graph, target: Target, eps: f64, outcome: &Outcome) -> anyhow::Result<(Vec<f64>, bool)> {
    match (target, outcome) {
        (Target::Phi | Target::PhiK(_), Outcome::Cut(c)) => {
            let phi = match target {
                Target::PhiK(k) => brute_force_k_way(g, k)?,
                _ => brute_force_sparsest_cut(g)?.1,
            };
            let ok = c.guarantee.0 <= phi + TOL && phi <= c.guarantee.1 + TOL;
            Ok((vec![phi], ok))
        }
        (_, Outcome::Eigen(est)) => {
            if g.n() > MAX_EIGEN_N {
                bail!("the dense oracle supports n <= {MAX_EIGEN_N}, got {}", g.n());
            }
            let s = laplacian_spectrum(g, false)?;
            let exact: Vec<f64> = match target {
                Target::LambdaN => vec![s.largest()],
                Target::Lambda2 => vec![s.lambda(2)],
                _ => (1..=est.len()).map(|i| s.lambda(i)).collect(),
            };
            let ok = exact.iter().zip(est).all(|(&x, e)| match target {
                Target::LambdaN => e.value >= (1.0 - eps) * x - TOL && e.value <= x + TOL,
                _ => e.value >= x - TOL && e.value <= x + eps + TOL,
            });
            Ok((exact, ok))
        }
        _ => unreachable!("outcome kind follows the target"),
    }
}

pub fn run(args: &EstimateArgs) -> anyhow::Result<ExitCode> {
    let target = Target::parse(&args.target)?;
    let g = input::load(&args.graph, GraphMode::Strict)?;
    let cfg = args.power.config(args.eps.unwrap_or(DEFAULT_EPS));
    cfg.validate()?;
    let cut = cut_config(cfg.clone(), args.c_ho, args.floor);
    let start = Instant::now();
    let outcome = execute(&g, target, args.eps, &cut)?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let oracle = if args.oracle {
        let (exact, ok) = oracle_check(&g, target, cfg.eps, &outcome)?;
        Some(json!({ "exact": exact, "sandwich_ok": ok }))
    } else {
        None
    };
    let n = g.n();
    let record = RunRecord {
        command: std::env::args().skip(1).collect(),
        graph: json!({ "source": args.graph, "n": n, "m": g.edge_count() }),
        config: json!({
            "target": target.name(),
            "k": target.k(),
            "eps": args.eps,
            "mantissa_bits": cfg.mantissa(n),
            "budget_bits": cfg.budget(n),
            "precision": cfg.precision,
            "c1": cfg.c1,
            "c2": cfg.c2,
            "c3": cfg.c3,
            "c4": cfg.c4,
            "c_ho": args.c_ho,
            "floor": args.floor,
            "max_restarts": cfg.max_restarts,
            "seed": cfg.seed,
        }),
        result: outcome.to_json()?,
        oracle,
        wall_ms: args.timing.then_some(wall_ms),
    };
    output::print_json(&output::to_json(&record)?)?;
    Ok(ExitCode::SUCCESS)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn targets() {
        assert_eq!(Target::parse(&words("lambda_2")).unwrap(), Target::Lambda2);
        assert_eq!(Target::parse(&words("lambda_k 3")).unwrap(), Target::LambdaK(3));
        assert_eq!(Target::parse(&words("phi_k 2")).unwrap(), Target::PhiK(2));
        assert!(Target::parse(&words("lambda_k")).is_err());
        assert!(Target::parse(&words("phi 3")).is_err());
        assert!(Target::parse(&words("lambda_3")).is_err());
    }
}
