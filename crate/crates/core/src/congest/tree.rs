use super::aggregate::count_format;
use super::{pipelined_sums, EngineError, Inbox, Message, Network, VertexContext, VertexProgram};
use crate::graph::Graph;
use crate::numeric::{ceil_log2, ExtFloat, TruncError};

/// A BFS tree, possibly covering only part of the graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AggregationTree {
    root: usize,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    depth: Vec<Option<usize>>,
}

impl AggregationTree {
    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// `None` for vertices outside the tree.
    pub fn depth(&self, v: usize) -> Option<usize> {
        self.depth[v]
    }

    pub fn height(&self) -> usize {
        self.depth.iter().flatten().copied().max().unwrap_or(0)
    }

    pub fn contains(&self, v: usize) -> bool {
        self.depth[v].is_some()
    }

    pub fn size(&self) -> usize {
        self.depth.iter().filter(|d| d.is_some()).count()
    }

    pub fn is_spanning(&self) -> bool {
        self.depth.iter().all(Option::is_some)
    }
}

/// Layer announcement: the sender's depth and chosen parent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BfsMessage {
    depth: u32,
    parent: Option<u32>,
    id_bits: u32,
}

impl Message for BfsMessage {
    fn bit_width(&self) -> u32 {
        2 * self.id_bits + 1
    }
}

struct BfsBuild {
    root: usize,
    limit: Option<u64>,
}

#[derive(Debug, Clone, Default)]
struct BfsState {
    joined: Option<u64>,
    depth: u32,
    parent: Option<usize>,
    children: Vec<usize>,
}

impl VertexProgram for BfsBuild {
    type State = BfsState;
    type Msg = BfsMessage;

    fn init(&self, ctx: &VertexContext<'_>) -> BfsState {
        let mut s = BfsState::default();
        if ctx.id == self.root {
            s.joined = Some(0);
        }
        s
    }

    fn send(&self, ctx: &VertexContext<'_>, s: &mut BfsState, round: u64) -> Result<Option<BfsMessage>, TruncError> {
        Ok((s.joined == Some(round - 1)).then(|| BfsMessage {
            depth: s.depth,
            parent: s.parent.map(|p| p as u32),
            id_bits: ceil_log2(ctx.n).max(1),
        }))
    }

    fn receive(&self, ctx: &VertexContext<'_>, s: &mut BfsState, round: u64, inbox: Inbox<'_, BfsMessage>) {
        let may_join = s.joined.is_none() && self.limit.is_none_or(|t| round <= t);
        for (u, _, m) in inbox {
            if m.parent == Some(ctx.id as u32) {
                s.children.push(u);
            }
            if may_join && s.joined.is_none() {
                s.joined = Some(round);
                s.depth = m.depth + 1;
                s.parent = Some(u);
            }
        }
    }

    fn halted(&self, _: &VertexContext<'_>, s: &BfsState, round: u64) -> bool {
        match s.joined {
            Some(r) => round >= r + 2,
            None => self.limit.is_some_and(|t| round >= t),
        }
    }

    fn fixed_horizon(&self) -> Option<u64> {
        self.limit
    }
}

fn grow(net: &mut Network<'_>, root: usize, limit: Option<u64>) -> Result<AggregationTree, EngineError> {
    let program = BfsBuild { root, limit };
    let mut states = net.init_states(&program);
    net.execute(&program, &mut states)?;
    Ok(AggregationTree {
        root,
        parent: states.iter().map(|s| s.parent).collect(),
        depth: states.iter().map(|s| s.joined.map(|_| s.depth as usize)).collect(),
        children: states.into_iter().map(|s| s.children).collect(),
    })
}

impl Network<'_> {
    /// BFS tree from `root`. Each vertex takes the lowest-id neighbor of the
    /// previous layer as parent; parents learn their children one round
    /// later, so construction takes `ecc(root) + 2` rounds.
    pub fn bfs_tree(&mut self, root: usize) -> Result<AggregationTree, EngineError> {
        grow(self, root, None)
    }

    /// Floods from vertex 0 for at most `threshold` rounds, then counts the
    /// reached vertices over the partial tree.
    pub fn diameter_probe(&mut self, threshold: u64) -> Result<ProbeOutcome, EngineError> {
        let tree = grow(self, 0, Some(threshold.max(1)))?;
        let n = self.graph().n();
        let ones: Vec<ExtFloat> = (0..n).map(|v| if tree.contains(v) { ExtFloat::ONE } else { ExtFloat::ZERO }).collect();
        let count = pipelined_sums(self, &tree, &[ones], count_format(n))?[0].to_f64();
        if count.round() as usize == n {
            Ok(ProbeOutcome::AtMost(tree))
        } else {
            Ok(ProbeOutcome::Exceeds)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProbeOutcome {
    /// Every vertex lies within the threshold of the root.
    AtMost(AggregationTree),
    Exceeds,
}

/// Convenience wrapper on a fresh default network.
pub fn bfs_tree(g: &Graph, root: usize) -> Result<(AggregationTree, super::RoundStats), EngineError> {
    let mut net = Network::with_defaults(g, 0)?;
    let t = net.bfs_tree(root)?;
    Ok((t, *net.stats()))
}

/// Convenience wrapper on a fresh default network.
pub fn diameter_probe(g: &Graph, threshold: u64) -> Result<(ProbeOutcome, super::RoundStats), EngineError> {
    let mut net = Network::with_defaults(g, 0)?;
    let p = net.diameter_probe(threshold)?;
    Ok((p, *net.stats()))
}
