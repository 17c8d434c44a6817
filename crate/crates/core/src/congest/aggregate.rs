use super::{AggregationTree, EngineError, Inbox, Message, Network, VertexContext, VertexProgram};
use crate::numeric::{ceil_log2, ExtFloat, TruncError, TruncatedReal, WireFormat};

/// One slot travelling up toward the root and one travelling down, each
/// behind a presence bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassMessage {
    pub up: Option<TruncatedReal>,
    pub down: Option<TruncatedReal>,
}

impl Message for PassMessage {
    fn bit_width(&self) -> u32 {
        2 + self.up.map_or(0, |t| t.bit_width()) + self.down.map_or(0, |t| t.bit_width())
    }
}

/// Exact format for vertex counts up to `n`.
pub(crate) fn count_format(n: usize) -> WireFormat {
    let b = ceil_log2(n + 1).max(2);
    WireFormat::new(b, ceil_log2(b as usize + 1) + 1).expect("small count format")
}

struct Pass<'s> {
    count: usize,
    format: WireFormat,
    _states: std::marker::PhantomData<&'s ()>,
}

struct PassState<'s> {
    inside: bool,
    root: bool,
    parent: Option<usize>,
    children: &'s [usize],
    acc: &'s mut [ExtFloat],
    reported: &'s mut [usize],
    sent_up: usize,
    results: &'s mut [ExtFloat],
    received: usize,
    forwarded: usize,
}

impl PassState<'_> {
    fn ready(&self, s: usize) -> bool {
        self.reported.iter().all(|&c| c > s)
    }

    fn push(&mut self, x: ExtFloat) {
        self.results[self.received] = x;
        self.received += 1;
    }
}

impl<'s> VertexProgram for Pass<'s> {
    type State = PassState<'s>;
    type Msg = PassMessage;

    fn init(&self, _: &VertexContext<'_>) -> PassState<'s> {
        unreachable!("pass states borrow buffers owned by pipelined_sums_flat")
    }

    fn send(&self, _: &VertexContext<'_>, s: &mut PassState<'s>, _: u64) -> Result<Option<PassMessage>, TruncError> {
        if !s.inside {
            return Ok(None);
        }
        let r = self.count;
        let mut up = None;
        if s.root {
            while s.sent_up < r && s.ready(s.sent_up) {
                let t = TruncatedReal::encode_flushing(s.acc[s.sent_up], self.format)?;
                s.push(t.decode_ext());
                s.sent_up += 1;
            }
        } else if s.sent_up < r && s.ready(s.sent_up) {
            up = Some(TruncatedReal::encode_flushing(s.acc[s.sent_up], self.format)?);
            s.sent_up += 1;
        }
        let mut down = None;
        if !s.children.is_empty() && s.forwarded < s.received {
            // Results are truncated values already, so re-encoding is exact.
            down = Some(TruncatedReal::encode_flushing(s.results[s.forwarded], self.format)?);
            s.forwarded += 1;
        }
        Ok((up.is_some() || down.is_some()).then_some(PassMessage { up, down }))
    }

    fn receive(&self, _: &VertexContext<'_>, s: &mut PassState<'s>, _: u64, inbox: Inbox<'_, PassMessage>) {
        if !s.inside {
            return;
        }
        for (i, &c) in s.children.iter().enumerate() {
            let slot = s.reported[i];
            if slot < self.count {
                if let Some(t) = inbox.from_neighbor(c).and_then(|m| m.up) {
                    s.acc[slot] += t.decode_ext();
                    s.reported[i] += 1;
                }
            }
        }
        if let Some(p) = s.parent.filter(|_| s.received < self.count) {
            if let Some(t) = inbox.from_neighbor(p).and_then(|m| m.down) {
                s.push(t.decode_ext());
            }
        }
    }

    fn halted(&self, _: &VertexContext<'_>, s: &PassState<'s>, _: u64) -> bool {
        if !s.inside {
            return true;
        }
        let drained = s.children.is_empty() || s.forwarded == self.count;
        s.received == self.count && drained && s.sent_up == self.count
    }
}

/// Sums `streams[s][v]` over the tree's vertices for every stream `s`.
/// Partial sums are truncated at every hop and the root's truncated total is
/// broadcast back down, so all tree vertices end up with identical values.
/// Costs `2 height + R - 1` rounds.
pub fn pipelined_sums(
    net: &mut Network<'_>,
    tree: &AggregationTree,
    streams: &[Vec<ExtFloat>],
    format: WireFormat,
) -> Result<Vec<ExtFloat>, EngineError> {
    let n = net.graph().n();
    let count = streams.len();
    let mut values = Vec::with_capacity(n * count);
    for v in 0..n {
        values.extend(streams.iter().map(|s| s[v]));
    }
    pipelined_sums_flat(net, tree, &values, count, format)
}

/// [`pipelined_sums`] over a vertex-major buffer of `count` streams.
pub fn pipelined_sums_flat(
    net: &mut Network<'_>,
    tree: &AggregationTree,
    values: &[ExtFloat],
    count: usize,
    format: WireFormat,
) -> Result<Vec<ExtFloat>, EngineError> {
    assert_eq!(values.len(), net.graph().n() * count, "one value per vertex and stream");
    if count == 0 {
        return Ok(Vec::new());
    }
    let n = net.graph().n();
    let mut acc = values.to_vec();
    let mut results = vec![ExtFloat::ZERO; n * count];
    let mut reported = vec![0usize; n];
    let mut states = Vec::with_capacity(n);
    let mut rest = &mut reported[..];
    for (v, (acc, results)) in acc.chunks_mut(count).zip(results.chunks_mut(count)).enumerate() {
        let (mine, tail) = std::mem::take(&mut rest).split_at_mut(tree.children(v).len());
        rest = tail;
        states.push(PassState {
            inside: tree.contains(v),
            root: v == tree.root(),
            parent: tree.parent(v),
            children: tree.children(v),
            acc,
            reported: mine,
            sent_up: 0,
            results,
            received: 0,
            forwarded: 0,
        });
    }
    let program = Pass { count, format, _states: std::marker::PhantomData };
    net.execute(&program, &mut states)?;
    let out = states[tree.root()].results.to_vec();
    debug_assert!(states.iter().enumerate().all(|(v, s)| !tree.contains(v) || *s.results == out[..]));
    Ok(out)
}

pub fn convergecast_sum(
    net: &mut Network<'_>,
    tree: &AggregationTree,
    values: &[ExtFloat],
    format: WireFormat,
) -> Result<ExtFloat, EngineError> {
    Ok(pipelined_sums(net, tree, &[values.to_vec()], format)?[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Bit(bool);

impl Message for Bit {
    fn bit_width(&self) -> u32 {
        1
    }
}

struct Cast<'a> {
    tree: &'a AggregationTree,
    value: bool,
}

impl VertexProgram for Cast<'_> {
    type State = (Option<bool>, bool);
    type Msg = Bit;

    fn init(&self, ctx: &VertexContext<'_>) -> Self::State {
        ((ctx.id == self.tree.root()).then_some(self.value), false)
    }

    fn send(&self, ctx: &VertexContext<'_>, s: &mut Self::State, _: u64) -> Result<Option<Bit>, TruncError> {
        match s {
            (Some(b), false) if !self.tree.children(ctx.id).is_empty() => {
                s.1 = true;
                Ok(Some(Bit(*b)))
            }
            _ => Ok(None),
        }
    }

    fn receive(&self, ctx: &VertexContext<'_>, s: &mut Self::State, _: u64, inbox: Inbox<'_, Bit>) {
        let parent = self.tree.parent(ctx.id);
        for (u, _, m) in inbox {
            if parent == Some(u) && s.0.is_none() {
                s.0 = Some(m.0);
            }
        }
    }

    fn halted(&self, ctx: &VertexContext<'_>, s: &Self::State, _: u64) -> bool {
        !self.tree.contains(ctx.id) || (s.0.is_some() && (s.1 || self.tree.children(ctx.id).is_empty()))
    }
}

/// Sends one bit from the root to every tree vertex in `height` rounds.
pub fn broadcast_from_root(net: &mut Network<'_>, tree: &AggregationTree, value: bool) -> Result<Vec<Option<bool>>, EngineError> {
    let program = Cast { tree, value };
    let mut states = net.init_states(&program);
    net.execute(&program, &mut states)?;
    Ok(states.into_iter().map(|s| s.0).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators;
    use proptest::prelude::*;

    fn fmt(b: u32) -> WireFormat {
        WireFormat::new(b, 16).unwrap()
    }

    #[test]
    fn star_all_ones() {
        let g = generators::star(5).unwrap();
        let mut net = Network::with_defaults(&g, 0).unwrap();
        let tree = net.bfs_tree(0).unwrap();
        let before = net.stats().rounds;
        let total = convergecast_sum(&mut net, &tree, &[ExtFloat::ONE; 6], fmt(16)).unwrap();
        assert_eq!(total.to_f64(), 6.0);
        assert_eq!(net.stats().rounds - before, 2);
    }

    #[test]
    fn degrees_of_triangle() {
        let g = generators::clique(3).unwrap();
        let mut net = Network::with_defaults(&g, 0).unwrap();
        let tree = net.bfs_tree(0).unwrap();
        let s = g.sqrt_degrees();
        let prods: Vec<ExtFloat> = s.iter().map(|x| ExtFloat::new(x * x)).collect();
        assert_eq!(convergecast_sum(&mut net, &tree, &prods, fmt(20)).unwrap().to_f64(), 6.0);
    }

    #[test]
    fn path_ten_with_eight_streams() {
        let g = generators::path(10).unwrap();
        let mut net = Network::with_defaults(&g, 0).unwrap();
        let tree = net.bfs_tree(0).unwrap();
        let streams: Vec<Vec<ExtFloat>> =
            (0..8).map(|s| (0..10).map(|v| ExtFloat::new((s * 10 + v) as f64)).collect()).collect();
        let before = net.stats().rounds;
        let sums = pipelined_sums(&mut net, &tree, &streams, fmt(24)).unwrap();
        assert_eq!(net.stats().rounds - before, 2 * 9 + 7);
        for (s, v) in sums.iter().enumerate() {
            assert_eq!(v.to_f64(), (0..10).map(|v| (s * 10 + v) as f64).sum::<f64>());
        }
    }

    #[test]
    fn one_stream_matches_convergecast() {
        let g = generators::cycle_clique(7, 4).unwrap();
        let mut net = Network::with_defaults(&g, 0).unwrap();
        let tree = net.bfs_tree(0).unwrap();
        let vals: Vec<ExtFloat> = (0..g.n()).map(|v| ExtFloat::new(1.0 / (v as f64 + 1.0))).collect();
        let a = convergecast_sum(&mut net, &tree, &vals, fmt(12)).unwrap();
        let b = pipelined_sums(&mut net, &tree, &[vals], fmt(12)).unwrap();
        assert_eq!(vec![a], b);
    }

    #[test]
    fn bit_broadcast_reaches_all() {
        let g = generators::path(7).unwrap();
        let mut net = Network::with_defaults(&g, 0).unwrap();
        let tree = net.bfs_tree(3).unwrap();
        let before = net.stats().rounds;
        let got = broadcast_from_root(&mut net, &tree, true).unwrap();
        assert!(got.iter().all(|b| *b == Some(true)));
        assert_eq!(net.stats().rounds - before, 3);
    }

    #[test]
    fn counts_are_exact() {
        for n in [2usize, 3, 7, 8, 255, 256, 1000] {
            let f = count_format(n);
            let t = TruncatedReal::encode(n as f64, f).unwrap();
            assert_eq!(t.decode(), n as f64);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn sums_close_and_pipelined(k in 3usize..14, l in 2usize..6, r in 1usize..10, b in 8u32..30, seed in 0u64..1000) {
            let g = generators::cycle_clique(k, l).unwrap();
            let mut net = Network::with_defaults(&g, 0).unwrap();
            let tree = net.bfs_tree(0).unwrap();
            let h = tree.height() as u64;
            let streams: Vec<Vec<ExtFloat>> = (0..r)
                .map(|s| (0..g.n()).map(|v| ExtFloat::new(((v as u64 * 31 + s as u64 * 17 + seed) % 97) as f64 + 0.5)).collect())
                .collect();
            let before = net.stats().rounds;
            let sums = pipelined_sums(&mut net, &tree, &streams, fmt(b)).unwrap();
            prop_assert_eq!(net.stats().rounds - before, 2 * h + r as u64 - 1);
            for (s, got) in sums.iter().enumerate() {
                let exact: f64 = streams[s].iter().map(|x| x.to_f64()).sum();
                let got = got.to_f64();
                prop_assert!(got <= exact * (1.0 + 1e-12));
                prop_assert!((exact - got) <= 2f64.powi(4 - b as i32) * exact);
            }
        }
    }
}
