//! Synchronous Broadcast CONGEST simulator.
//!
//! In every round each vertex may broadcast one message; all neighbors see the
//! same message. Widths are checked against the per-message bit budget.

mod aggregate;
mod tree;

pub use aggregate::{broadcast_from_root, convergecast_sum, pipelined_sums, pipelined_sums_flat, PassMessage};
pub use tree::{bfs_tree, diameter_probe, AggregationTree, BfsMessage, ProbeOutcome};

use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;
use crate::numeric::{ceil_log2, TruncError, TruncatedReal};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("vertex {vertex} sent {width} bits in round {round}, budget is {budget}")]
    BudgetViolation { vertex: usize, round: u64, width: u32, budget: u32 },
    #[error("exceeded the limit of {max_rounds} rounds")]
    MaxRoundsExceeded { max_rounds: u64 },
    #[error("vertex {vertex} failed to encode in round {round}: {source}")]
    Encoding { vertex: usize, round: u64, source: TruncError },
    #[error("vertex {0} has zero degree")]
    ZeroDegree(usize),
}

pub trait Message {
    fn bit_width(&self) -> u32;
}

impl Message for TruncatedReal {
    fn bit_width(&self) -> u32 {
        TruncatedReal::bit_width(self)
    }
}

/// What a vertex knows about itself: id, `n`, incident edges and a seed.
#[derive(Debug, Clone, Copy)]
pub struct VertexContext<'a> {
    pub id: usize,
    pub n: usize,
    pub neighbors: &'a [(usize, f64)],
    pub degree: f64,
    pub seed: u64,
}

/// Messages heard by one vertex in one round, as `(sender, edge weight, msg)`.
pub struct Inbox<'a, M> {
    neighbors: std::slice::Iter<'a, (usize, f64)>,
    outbox: &'a [Option<M>],
}

impl<'a, M> Inbox<'a, M> {
    /// The message neighbor `u` sent this round, if any.
    #[inline]
    pub fn from_neighbor(&self, u: usize) -> Option<&'a M> {
        debug_assert!(self.neighbors.as_slice().iter().any(|&(x, _)| x == u), "{u} is not a neighbor");
        self.outbox[u].as_ref()
    }
}

impl<'a, M> Iterator for Inbox<'a, M> {
    type Item = (usize, f64, &'a M);

    fn next(&mut self) -> Option<Self::Item> {
        for &(u, w) in self.neighbors.by_ref() {
            if let Some(m) = &self.outbox[u] {
                return Some((u, w, m));
            }
        }
        None
    }
}

/// Per-vertex state machine. `round` counts from 1 within one execution.
pub trait VertexProgram {
    type State;
    type Msg: Message;

    fn init(&self, ctx: &VertexContext<'_>) -> Self::State;

    fn send(&self, ctx: &VertexContext<'_>, state: &mut Self::State, round: u64)
        -> Result<Option<Self::Msg>, TruncError>;

    fn receive(&self, ctx: &VertexContext<'_>, state: &mut Self::State, round: u64, inbox: Inbox<'_, Self::Msg>);

    fn halted(&self, ctx: &VertexContext<'_>, state: &Self::State, round: u64) -> bool;

    /// A round by which every vertex is known to halt. When a round passes in
    /// silence the simulator jumps here, still counting the skipped rounds.
    fn fixed_horizon(&self) -> Option<u64> {
        None
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RoundStats {
    pub rounds: u64,
    pub max_message_bits: u32,
    /// Bits delivered, summed over every (message, receiving neighbor) pair.
    pub total_bits: u64,
    #[serde(skip)]
    pub violations: u64,
    #[serde(skip)]
    pub messages: u64,
}

impl RoundStats {
    pub fn absorb(&mut self, other: &RoundStats) {
        self.rounds += other.rounds;
        self.max_message_bits = self.max_message_bits.max(other.max_message_bits);
        self.total_bits += other.total_bits;
        self.violations += other.violations;
        self.messages += other.messages;
    }
}

pub fn default_budget_bits(n: usize) -> u32 {
    32 * ceil_log2(n).max(1)
}

/// A graph plus the running round and bit ledger. Several programs can be
/// executed one after another on the same network; their costs add up.
pub struct Network<'g> {
    graph: &'g Graph,
    contexts: Vec<VertexContext<'g>>,
    budget_bits: u32,
    max_rounds: u64,
    seed: u64,
    stats: RoundStats,
}

impl<'g> Network<'g> {
    pub fn new(graph: &'g Graph, budget_bits: u32, max_rounds: u64, seed: u64) -> Result<Network<'g>, EngineError> {
        if let Some(v) = (0..graph.n()).find(|&v| graph.degree(v) <= 0.0) {
            return Err(EngineError::ZeroDegree(v));
        }
        let contexts = (0..graph.n())
            .map(|v| VertexContext { id: v, n: graph.n(), neighbors: graph.neighbors(v), degree: graph.degree(v), seed })
            .collect();
        Ok(Network { graph, contexts, budget_bits, max_rounds, seed, stats: RoundStats::default() })
    }

    pub fn with_defaults(graph: &'g Graph, seed: u64) -> Result<Network<'g>, EngineError> {
        Network::new(graph, default_budget_bits(graph.n()), u64::MAX, seed)
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn budget_bits(&self) -> u32 {
        self.budget_bits
    }

    pub fn stats(&self) -> &RoundStats {
        &self.stats
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn init_states<P: VertexProgram>(&self, program: &P) -> Vec<P::State> {
        self.contexts.iter().map(|c| program.init(c)).collect()
    }

    /// Runs `program` until every vertex halts; returns the rounds it took.
    pub fn execute<P: VertexProgram>(&mut self, program: &P, states: &mut [P::State]) -> Result<u64, EngineError> {
        let n = self.graph.n();
        assert_eq!(states.len(), n, "one state per vertex");
        let contexts = &self.contexts;
        let mut outbox: Vec<Option<P::Msg>> = (0..n).map(|_| None).collect();
        let mut round = 0u64;
        let all_halted = |states: &[P::State], round: u64| (0..n).all(|v| program.halted(&contexts[v], &states[v], round));
        while !all_halted(states, round) {
            if self.stats.rounds >= self.max_rounds {
                return Err(EngineError::MaxRoundsExceeded { max_rounds: self.max_rounds });
            }
            round += 1;
            self.stats.rounds += 1;
            let mut silent = true;
            for v in 0..n {
                let msg = program
                    .send(&contexts[v], &mut states[v], round)
                    .map_err(|source| EngineError::Encoding { vertex: v, round, source })?;
                if let Some(m) = &msg {
                    let width = m.bit_width();
                    if width > self.budget_bits {
                        self.stats.violations += 1;
                        return Err(EngineError::BudgetViolation { vertex: v, round, width, budget: self.budget_bits });
                    }
                    silent = false;
                    self.stats.max_message_bits = self.stats.max_message_bits.max(width);
                    self.stats.total_bits += width as u64 * contexts[v].neighbors.len() as u64;
                    self.stats.messages += 1;
                }
                outbox[v] = msg;
            }
            for v in 0..n {
                let inbox = Inbox { neighbors: contexts[v].neighbors.iter(), outbox: &outbox };
                program.receive(&contexts[v], &mut states[v], round, inbox);
            }
            if silent {
                if let Some(h) = program.fixed_horizon() {
                    if h > round {
                        let skip = (h - round).min(self.max_rounds.saturating_sub(self.stats.rounds));
                        self.stats.rounds += skip;
                        round += skip;
                    }
                }
            }
        }
        Ok(round)
    }
}

/// Runs one program on a fresh network.
pub fn run<P: VertexProgram>(
    graph: &Graph,
    program: &P,
    max_rounds: u64,
    budget_bits: u32,
    seed: u64,
) -> Result<(Vec<P::State>, RoundStats), EngineError> {
    let mut net = Network::new(graph, budget_bits, max_rounds, seed)?;
    let mut states = net.init_states(program);
    net.execute(program, &mut states)?;
    Ok((states, net.stats))
}

/// Flooding from one source: a vertex forwards a one-bit token the round
/// after it first hears it. State is the round of first arrival.
pub struct Flood {
    pub source: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token;

impl Message for Token {
    fn bit_width(&self) -> u32 {
        1
    }
}

impl VertexProgram for Flood {
    type State = Option<u64>;
    type Msg = Token;

    fn init(&self, ctx: &VertexContext<'_>) -> Option<u64> {
        (ctx.id == self.source).then_some(0)
    }

    fn send(&self, _: &VertexContext<'_>, state: &mut Option<u64>, round: u64) -> Result<Option<Token>, TruncError> {
        Ok((*state == Some(round - 1)).then_some(Token))
    }

    fn receive(&self, _: &VertexContext<'_>, state: &mut Option<u64>, round: u64, mut inbox: Inbox<'_, Token>) {
        if state.is_none() && inbox.next().is_some() {
            *state = Some(round);
        }
    }

    fn halted(&self, ctx: &VertexContext<'_>, state: &Option<u64>, round: u64) -> bool {
        match state {
            Some(r) => round > *r || ctx.neighbors.is_empty(),
            None => false,
        }
    }
}
