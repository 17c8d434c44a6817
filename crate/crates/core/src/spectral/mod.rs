//! Truncated distributed power iteration for `lambda_n`, `lambda_2` and the
//! `k` smallest eigenvalues of the normalized Laplacian.

mod power;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::congest::{broadcast_from_root, default_budget_bits, AggregationTree, EngineError, Network, ProbeOutcome, RoundStats};
use crate::graph::Graph;
use crate::numeric::{default_mantissa_bits, ExtFloat, TruncError, WireFormat};
use power::{bounds, log_entry, run_level, Level, Operator, Outcome, Stored};

pub const MAX_K: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Trunc(#[from] TruncError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("k = {k} out of range 1..={max}")]
    BadK { k: usize, max: usize },
    #[error("every instance vanished after {restarts} restarts")]
    RestartsExhausted { restarts: u32 },
    #[error("start vector has {got} entries, graph has {n} vertices")]
    Length { got: usize, n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Precision {
    /// Messages carry the configured mantissa width.
    Truncated,
    /// Messages carry full 53-bit mantissas.
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerConfig {
    pub eps: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// Re-projection period is `ceil(c4 ln n)`.
    pub c4: f64,
    /// Defaults to `min(53, 2 ceil(log2 n) + 8)`.
    pub mantissa_bits: Option<u32>,
    /// Defaults to `32 ceil(log2 n)`.
    pub budget_bits: Option<u32>,
    pub precision: Precision,
    pub max_rounds: u64,
    pub max_restarts: u32,
    pub seed: u64,
}

impl Default for PowerConfig {
    fn default() -> Self {
        PowerConfig {
            eps: 0.05,
            c1: 4.0,
            c2: 3.0,
            c3: 8.0,
            c4: 1.0,
            mantissa_bits: None,
            budget_bits: None,
            precision: Precision::Truncated,
            max_rounds: u64::MAX,
            max_restarts: 3,
            seed: 0,
        }
    }
}

fn ln(n: usize) -> f64 {
    (n.max(2) as f64).ln()
}

impl PowerConfig {
    pub fn new(eps: f64) -> PowerConfig {
        PowerConfig { eps, ..PowerConfig::default() }
    }

    pub fn with_seed(mut self, seed: u64) -> PowerConfig {
        self.seed = seed;
        self
    }

    pub fn with_precision(mut self, precision: Precision) -> PowerConfig {
        self.precision = precision;
        self
    }

    pub fn iterations_for(&self, n: usize, eta: f64) -> u64 {
        ((self.c1 * ln(n) / eta).ceil() as u64).max(1)
    }

    pub fn iterations(&self, n: usize) -> u64 {
        self.iterations_for(n, self.eps)
    }

    pub fn instances(&self, n: usize) -> usize {
        ((self.c2 * ln(n)).ceil() as usize).max(1)
    }

    pub fn probe_threshold(&self, n: usize, k: usize) -> u64 {
        ((self.c3 * k as f64 * ln(n) / self.eps).ceil() as u64).max(1)
    }

    pub fn projection_period(&self, n: usize) -> u64 {
        ((self.c4 * ln(n)).ceil() as u64).max(1)
    }

    pub fn mantissa(&self, n: usize) -> u32 {
        match self.precision {
            Precision::Full => 53,
            Precision::Truncated => self.mantissa_bits.unwrap_or_else(|| default_mantissa_bits(n)),
        }
    }

    pub fn budget(&self, n: usize) -> u32 {
        self.budget_bits.unwrap_or_else(|| default_budget_bits(n))
    }

    /// Whether `eps >= 16 / n`, the regime in which the iteration count is
    /// known to suffice. Smaller values still run.
    pub fn meets_precondition(&self, n: usize) -> bool {
        self.eps >= 16.0 / n as f64
    }

    pub fn format(&self, n: usize, t_max: u64) -> Result<WireFormat, SpectralError> {
        let slack = u64::from(crate::numeric::ceil_log2(n)) + 8;
        Ok(WireFormat::for_iterations(self.mantissa(n), t_max.saturating_add(slack))?)
    }

    pub fn validate(&self) -> Result<(), SpectralError> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.eps) || self.eps > 2.0 {
            return Err(SpectralError::Config(format!("eps must lie in (0, 2], got {}", self.eps)));
        }
        for (name, c) in [("c1", self.c1), ("c2", self.c2), ("c3", self.c3), ("c4", self.c4)] {
            if !positive(c) {
                return Err(SpectralError::Config(format!("{name} must be positive, got {c}")));
            }
        }
        if let Some(b) = self.mantissa_bits {
            if !(2..=53).contains(&b) {
                return Err(SpectralError::Config(format!("mantissa bits must lie in 2..=53, got {b}")));
            }
        }
        Ok(())
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of one power-method instance. Level 0 is `lambda_n`, level 1 is
/// `lambda_2` and level `j` of the `k`-smallest cascade is `j`.
pub fn instance_seed(seed: u64, level: u32, instance: usize, restart: u32) -> u64 {
    let mut h = splitmix(seed);
    for part in [u64::from(level), instance as u64, u64::from(restart)] {
        h = splitmix(h ^ part);
    }
    h
}

/// The entry vertex `v` draws from its own generator.
pub fn start_sign(seed: u64, v: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix(seed ^ splitmix(v as u64)));
    if rng.next_u32() & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn sample_start_vector(n: usize, seed: u64) -> Vec<f64> {
    (0..n).map(|v| start_sign(seed, v)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    LambdaN,
    /// `lambda_i`, 1-based; `Lambda(2)` is `lambda_2`.
    Lambda(usize),
}

impl Which {
    pub fn label(self) -> String {
        match self {
            Which::LambdaN => "lambda_n".to_string(),
            Which::Lambda(i) => format!("lambda_{i}"),
        }
    }
}

impl Serialize for Which {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

/// Final Rayleigh value of one instance, in the space of the iterated matrix
/// without shift: `L` for `lambda_n`, `2I - L` with deflation otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InstanceLog {
    pub instance: usize,
    pub restart: u32,
    pub rayleigh: f64,
}

/// A stored approximate eigenpair `(mu, v)` of `2I - L`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeflationPair {
    pub mu: f64,
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenEstimate {
    pub which: Which,
    pub value: f64,
    pub eps: f64,
    /// Unit-norm approximate eigenvector, one entry per vertex.
    pub vector: Option<Vec<f64>>,
    /// Cumulative cost up to the point this value was known.
    pub stats: RoundStats,
    pub instance_id: Option<usize>,
    pub instances: usize,
    pub iterations: u64,
    pub mantissa_bits: u32,
    pub early_exit: bool,
    pub restarts: u32,
    /// The recovered top value of the deflated matrix fell below `eps`.
    pub below_eps: bool,
    pub log: Vec<InstanceLog>,
    /// `|<x, v>| / |x|` against the null vector before each re-projection.
    pub drift: Vec<f64>,
    /// Pairs deflated from `2I - L` besides `sqrt(deg)` while computing this value.
    pub deflation: Vec<DeflationPair>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenSummary {
    pub which: String,
    pub value: f64,
    pub eps: f64,
    pub rounds: u64,
    pub instances: usize,
    pub early_exit: bool,
    pub restarts: u32,
}

impl EigenEstimate {
    pub fn summary(&self) -> EigenSummary {
        EigenSummary {
            which: self.which.label(),
            value: self.value,
            eps: self.eps,
            rounds: self.stats.rounds,
            instances: self.instances,
            early_exit: self.early_exit,
            restarts: self.restarts,
        }
    }

    fn trivial(which: Which, value: f64, eps: f64, stats: RoundStats, early_exit: bool) -> EigenEstimate {
        EigenEstimate {
            which,
            value,
            eps,
            vector: None,
            stats,
            instance_id: None,
            instances: 0,
            iterations: 0,
            mantissa_bits: 0,
            early_exit,
            restarts: 0,
            below_eps: false,
            log: Vec::new(),
            drift: Vec::new(),
            deflation: Vec::new(),
        }
    }
}

fn unit(x: &[ExtFloat]) -> Vec<f64> {
    let norm = x.iter().fold(ExtFloat::ZERO, |a, &v| a + v * v).sqrt();
    x.iter().map(|&v| v.ratio(norm)).collect()
}

fn null_vector(g: &Graph) -> Vec<f64> {
    let s = g.sqrt_degrees();
    let norm = s.iter().map(|x| x * x).sum::<f64>().sqrt();
    s.into_iter().map(|x| x / norm).collect()
}

struct Boosted {
    best: Outcome,
    value: f64,
    log: Vec<InstanceLog>,
    restarts: u32,
    volume: ExtFloat,
    drift: Vec<f64>,
}

enum Pick {
    Max,
    Min,
}

struct LevelPlan<'a> {
    op: Operator,
    shift: f64,
    null_period: Option<u64>,
    stored: &'a [Stored],
    iterations: u64,
    level: u32,
    format: WireFormat,
    pick: Pick,
}

/// Runs `R` instances, restarting vanished ones, and picks the extreme
/// one-sided estimate. Logged values are in `2I - L` space when deflating.
fn boosted(
    net: &mut Network<'_>,
    tree: &AggregationTree,
    plan: &LevelPlan<'_>,
    cfg: &PowerConfig,
    mut volume: Option<ExtFloat>,
) -> Result<Boosted, SpectralError> {
    let n = net.graph().n();
    let mut pending: Vec<(usize, u32)> = (0..cfg.instances(n)).map(|i| (i, 0)).collect();
    let mut finished: Vec<(Outcome, f64)> = Vec::new();
    let mut log = Vec::new();
    let mut drift = Vec::new();
    let mut restarts = 0;
    while !pending.is_empty() {
        let level = Level {
            op: plan.op,
            shift: plan.shift,
            null_period: plan.null_period,
            stored: plan.stored,
            iterations: plan.iterations,
            seeds: pending.iter().map(|&(i, r)| (i, r, instance_seed(cfg.seed, plan.level, i, r))).collect(),
            format: plan.format,
            start: None,
        };
        let run = run_level(net, tree, &level, volume)?;
        volume = Some(run.volume);
        drift.extend(run.drift);
        let mut again = Vec::new();
        for o in run.outcomes {
            match bounds(&o, plan.stored, run.volume, tree.height(), plan.format) {
                Some(b) => {
                    let (value, logged) = match plan.op {
                        Operator::Laplacian => (b.lower, b.lower),
                        Operator::Complement => (b.upper, 2.0 - b.upper),
                    };
                    log.push(log_entry(&o, logged));
                    finished.push((o, value));
                }
                None if o.restart < cfg.max_restarts => again.push((o.instance, o.restart + 1)),
                None => {}
            }
        }
        restarts += again.len() as u32;
        pending = again;
    }
    let best = match plan.pick {
        Pick::Max => finished.into_iter().max_by(|a, b| a.1.total_cmp(&b.1)),
        Pick::Min => finished.into_iter().min_by(|a, b| a.1.total_cmp(&b.1)),
    };
    let (best, value) = best.ok_or(SpectralError::RestartsExhausted { restarts })?;
    Ok(Boosted { best, value, log, restarts, volume: volume.unwrap_or(ExtFloat::ZERO), drift })
}

fn network<'g>(g: &'g Graph, cfg: &PowerConfig) -> Result<Network<'g>, SpectralError> {
    cfg.validate()?;
    Ok(Network::new(g, cfg.budget(g.n()), cfg.max_rounds, cfg.seed)?)
}

/// `(1 - eps) lambda_n <= value <= lambda_n` with high probability; the upper
/// side holds deterministically.
pub fn estimate_lambda_n(g: &Graph, cfg: &PowerConfig) -> Result<EigenEstimate, SpectralError> {
    let mut net = network(g, cfg)?;
    let n = g.n();
    let tree = net.bfs_tree(0)?;
    let iterations = cfg.iterations(n);
    let format = cfg.format(n, iterations)?;
    let plan = LevelPlan {
        op: Operator::Laplacian,
        shift: 0.0,
        null_period: None,
        stored: &[],
        iterations,
        level: 0,
        format,
        pick: Pick::Max,
    };
    let b = boosted(&mut net, &tree, &plan, cfg, None)?;
    Ok(EigenEstimate {
        which: Which::LambdaN,
        value: b.value,
        eps: cfg.eps,
        vector: Some(unit(&b.best.x)),
        stats: *net.stats(),
        instance_id: Some(b.best.instance),
        instances: cfg.instances(n),
        iterations,
        mantissa_bits: format.mantissa_bits(),
        early_exit: false,
        restarts: b.restarts,
        below_eps: false,
        log: b.log,
        drift: b.drift,
        deflation: Vec::new(),
    })
}

/// `lambda_2 <= value <= lambda_2 + eps` with high probability; the lower
/// side holds deterministically. Graphs whose diameter exceeds the probe
/// threshold get `2 eps` with `early_exit` set.
pub fn estimate_lambda_2(g: &Graph, cfg: &PowerConfig) -> Result<EigenEstimate, SpectralError> {
    let mut net = network(g, cfg)?;
    let n = g.n();
    let tree = match net.diameter_probe(cfg.probe_threshold(n, 1))? {
        ProbeOutcome::Exceeds => {
            return Ok(EigenEstimate::trivial(Which::Lambda(2), 2.0 * cfg.eps, cfg.eps, *net.stats(), true));
        }
        ProbeOutcome::AtMost(t) => t,
    };
    let iterations = cfg.iterations_for(n, cfg.eps / 2.0);
    let format = cfg.format(n, iterations)?;
    let plan = LevelPlan {
        op: Operator::Complement,
        shift: 0.0,
        null_period: Some(cfg.projection_period(n)),
        stored: &[],
        iterations,
        level: 1,
        format,
        pick: Pick::Min,
    };
    let b = boosted(&mut net, &tree, &plan, cfg, None)?;
    Ok(EigenEstimate {
        which: Which::Lambda(2),
        value: b.value,
        eps: cfg.eps,
        vector: Some(unit(&b.best.x)),
        stats: *net.stats(),
        instance_id: Some(b.best.instance),
        instances: cfg.instances(n),
        iterations,
        mantissa_bits: format.mantissa_bits(),
        early_exit: false,
        restarts: b.restarts,
        below_eps: false,
        log: b.log,
        drift: b.drift,
        deflation: Vec::new(),
    })
}

/// Accuracy target of level `j` in a cascade of `k`: stored levels need
/// `eps^3 / (20 k)`, the last one only `eps / (2 + eps)` on the shifted matrix.
pub fn cascade_accuracy(eps: f64, k: usize, j: usize) -> f64 {
    if j < k {
        eps.powi(3) / (20.0 * k as f64)
    } else {
        eps / (2.0 + eps)
    }
}

/// `lambda_1 .. lambda_k` by successive deflation, each within
/// `[lambda_i, lambda_i + eps]` with high probability.
pub fn estimate_smallest_k(g: &Graph, k: usize, cfg: &PowerConfig) -> Result<Vec<EigenEstimate>, SpectralError> {
    let n = g.n();
    if k == 0 || k > MAX_K.min(n) {
        return Err(SpectralError::BadK { k, max: MAX_K.min(n) });
    }
    let mut net = network(g, cfg)?;
    let probe = net.diameter_probe(cfg.probe_threshold(n, k))?;
    let mut first = EigenEstimate::trivial(Which::Lambda(1), 0.0, cfg.eps, *net.stats(), false);
    first.vector = Some(null_vector(g));
    let tree = match probe {
        ProbeOutcome::Exceeds => {
            first.early_exit = true;
            let mut out = vec![first];
            for i in 2..=k {
                out.push(EigenEstimate::trivial(Which::Lambda(i), cfg.eps, cfg.eps, *net.stats(), true));
            }
            return Ok(out);
        }
        ProbeOutcome::AtMost(t) => t,
    };
    let t_max = (2..=k).map(|j| cfg.iterations_for(n, cascade_accuracy(cfg.eps, k, j))).max().unwrap_or(1);
    let format = cfg.format(n, t_max)?;
    let mut out = vec![first];
    let mut stored: Vec<Stored> = Vec::new();
    let mut volume = None;
    for j in 2..=k {
        let iterations = cfg.iterations_for(n, cascade_accuracy(cfg.eps, k, j));
        let plan = LevelPlan {
            op: Operator::Complement,
            shift: cfg.eps,
            null_period: Some(cfg.projection_period(n)),
            stored: &stored,
            iterations,
            level: j as u32,
            format,
            pick: Pick::Min,
        };
        let b = boosted(&mut net, &tree, &plan, cfg, volume)?;
        volume = Some(b.volume);
        let mu = 2.0 - b.value;
        let deflation = stored.iter().map(|s| DeflationPair { mu: s.mu, vector: s.entries.clone() }).collect();
        if j < k {
            let v = store(&mut net, &tree, &b.best, &stored, b.volume)?;
            stored.push(Stored { mu, entries: v });
        }
        out.push(EigenEstimate {
            which: Which::Lambda(j),
            value: b.value,
            eps: cfg.eps,
            vector: Some(unit(&b.best.x)),
            stats: *net.stats(),
            instance_id: Some(b.best.instance),
            instances: cfg.instances(n),
            iterations,
            mantissa_bits: format.mantissa_bits(),
            early_exit: false,
            restarts: b.restarts,
            below_eps: mu < cfg.eps,
            log: b.log,
            drift: b.drift,
            deflation,
        });
    }
    Ok(out)
}

/// Orthonormalizes the winning vector against `sqrt(deg)` and the stored
/// vectors with the coefficients every vertex already holds, then fixes the
/// sign so the root's entry is nonnegative.
fn store(
    net: &mut Network<'_>,
    tree: &AggregationTree,
    o: &Outcome,
    stored: &[Stored],
    volume: ExtFloat,
) -> Result<Vec<f64>, SpectralError> {
    let sqrt_deg = net.graph().sqrt_degrees();
    let mut norm2 = o.denom - o.null_coeff * o.null_coeff / volume;
    for c in &o.coeffs {
        norm2 = norm2 - *c * *c;
    }
    let u: Vec<ExtFloat> = (0..o.x.len())
        .map(|v| {
            let mut x = o.x[v] - o.null_coeff / volume * ExtFloat::new(sqrt_deg[v]);
            for (c, s) in o.coeffs.iter().zip(stored) {
                x = x - *c * ExtFloat::new(s.entries[v]);
            }
            x
        })
        .collect();
    let norm = if norm2.is_sign_negative() || norm2.is_zero() {
        u.iter().fold(ExtFloat::ZERO, |a, &v| a + v * v).sqrt()
    } else {
        norm2.sqrt()
    };
    let flip = u[tree.root()].is_sign_negative();
    broadcast_from_root(net, tree, flip)?;
    let sign = if flip { -1.0 } else { 1.0 };
    Ok(u.iter().map(|&x| sign * x.ratio(norm)).collect())
}

/// Rayleigh quotient of `x` against `2I - L`, from one exchange and one
/// pipelined pass. The returned value never exceeds the exact quotient of
/// the truncated vector.
pub fn rayleigh(g: &Graph, x: &[f64], cfg: &PowerConfig) -> Result<(f64, RoundStats), SpectralError> {
    if x.len() != g.n() {
        return Err(SpectralError::Length { got: x.len(), n: g.n() });
    }
    let mut net = network(g, cfg)?;
    let tree = net.bfs_tree(0)?;
    let format = cfg.format(g.n(), 1)?;
    let level = Level {
        op: Operator::Complement,
        shift: 0.0,
        null_period: None,
        stored: &[],
        iterations: 0,
        seeds: vec![(0, 0, 0)],
        format,
        start: Some(x),
    };
    let run = run_level(&mut net, &tree, &level, None)?;
    let o = &run.outcomes[0];
    let b = bounds(o, &[], ExtFloat::ZERO, tree.height(), format).ok_or(SpectralError::RestartsExhausted { restarts: 0 })?;
    Ok((2.0 - b.upper, *net.stats()))
}

#[cfg(test)]
mod tests;
