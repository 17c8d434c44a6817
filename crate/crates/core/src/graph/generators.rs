//! Fixture families. Every auxiliary structure is attached through a single
//! unit-weight bridge edge.
//!
//! Vertex layouts:
//!
//! - `cycle(k)`: `0..k` in cyclic order.
//! - `path(k)`: `0..k`, endpoints `0` and `k - 1`.
//! - `star(l)`: center `0`, leaves `1..=l`.
//! - `cycle_clique(k, l)`: cycle `0..k`, clique `k..k+l`, bridge `0 - k`.
//! - `cycle_two_cliques(k, l, l2)`: as above plus a clique `k+l..k+l+l2`
//!   bridged to cycle vertex `k / 2`.
//! - `barbell(d, size)`: clique `A`, a path of `d - 2` vertices, clique `B`;
//!   the last vertex of `A` and the first of `B` meet the path ends.
//!   `n = d - 2 + 2 size` and the hop diameter is `d + 1`.
//! - `path_clique_star(d, size)`: clique, path of `d - 2` vertices, then a star
//!   on `size` vertices whose center meets the path. Same `n` as `barbell`.
//! - `clique_chain(count, size)`: cliques in a row, the last vertex of each
//!   bridged to the first vertex of the next.

use super::{Graph, GraphError, GraphMode};

fn need(ok: bool, what: &str) -> Result<(), GraphError> {
    if ok {
        Ok(())
    } else {
        Err(GraphError::InvalidParameter(what.to_string()))
    }
}

fn build(n: usize, edges: Vec<(usize, usize)>) -> Result<Graph, GraphError> {
    Graph::from_edges(n, edges.into_iter().map(|(u, v)| (u, v, 1.0)), GraphMode::Strict)
}

fn clique_edges(offset: usize, l: usize, edges: &mut Vec<(usize, usize)>) {
    for u in 0..l {
        for v in u + 1..l {
            edges.push((offset + u, offset + v));
        }
    }
}

fn path_edges(offset: usize, k: usize, edges: &mut Vec<(usize, usize)>) {
    for v in 1..k {
        edges.push((offset + v - 1, offset + v));
    }
}

fn cycle_edges(offset: usize, k: usize, edges: &mut Vec<(usize, usize)>) {
    path_edges(offset, k, edges);
    edges.push((offset, offset + k - 1));
}

pub fn cycle(k: usize) -> Result<Graph, GraphError> {
    need(k >= 3, "cycle needs k >= 3")?;
    let mut e = Vec::new();
    cycle_edges(0, k, &mut e);
    build(k, e)
}

pub fn clique(l: usize) -> Result<Graph, GraphError> {
    need(l >= 2, "clique needs l >= 2")?;
    let mut e = Vec::new();
    clique_edges(0, l, &mut e);
    build(l, e)
}

pub fn path(k: usize) -> Result<Graph, GraphError> {
    need(k >= 2, "path needs k >= 2")?;
    let mut e = Vec::new();
    path_edges(0, k, &mut e);
    build(k, e)
}

pub fn star(leaves: usize) -> Result<Graph, GraphError> {
    need(leaves >= 1, "star needs at least one leaf")?;
    build(leaves + 1, (1..=leaves).map(|v| (0, v)).collect())
}

pub fn cycle_clique(k: usize, l: usize) -> Result<Graph, GraphError> {
    need(k >= 3, "cycle needs k >= 3")?;
    need(l >= 2, "clique needs l >= 2")?;
    let mut e = Vec::new();
    cycle_edges(0, k, &mut e);
    clique_edges(k, l, &mut e);
    e.push((0, k));
    build(k + l, e)
}

pub fn cycle_two_cliques(k: usize, l: usize, l2: usize) -> Result<Graph, GraphError> {
    need(k >= 3, "cycle needs k >= 3")?;
    need(l >= 2 && l2 >= 2, "cliques need size >= 2")?;
    let mut e = Vec::new();
    cycle_edges(0, k, &mut e);
    clique_edges(k, l, &mut e);
    clique_edges(k + l, l2, &mut e);
    e.push((0, k));
    e.push((k / 2, k + l));
    build(k + l + l2, e)
}

fn clique_path_tail(d: usize, size: usize, star_tail: bool) -> Result<Graph, GraphError> {
    need(d >= 2, "d must be >= 2")?;
    need(size >= 2, "size must be >= 2")?;
    let inner = d - 2;
    let mut e = Vec::new();
    clique_edges(0, size, &mut e);
    path_edges(size, inner, &mut e);
    let tail = size + inner;
    if star_tail {
        e.extend((1..size).map(|i| (tail, tail + i)));
    } else {
        clique_edges(tail, size, &mut e);
    }
    if inner == 0 {
        e.push((size - 1, tail));
    } else {
        e.push((size - 1, size));
        e.push((size + inner - 1, tail));
    }
    build(2 * size + inner, e)
}

pub fn barbell(d: usize, size: usize) -> Result<Graph, GraphError> {
    clique_path_tail(d, size, false)
}

pub fn path_clique_star(d: usize, size: usize) -> Result<Graph, GraphError> {
    clique_path_tail(d, size, true)
}

pub fn clique_chain(count: usize, size: usize) -> Result<Graph, GraphError> {
    need(count >= 1, "need at least one clique")?;
    need(size >= 2, "clique needs size >= 2")?;
    let mut e = Vec::new();
    for c in 0..count {
        clique_edges(c * size, size, &mut e);
        if c > 0 {
            e.push((c * size - 1, c * size));
        }
    }
    build(count * size, e)
}

/// Two copies of `K_m` joined by one bridge.
pub fn bridged_cliques(m: usize) -> Result<Graph, GraphError> {
    clique_chain(2, m)
}

/// Family names accepted by [`by_name`], with their parameter counts.
pub const FAMILIES: &[(&str, usize)] = &[
    ("cycle", 1),
    ("clique", 1),
    ("path", 1),
    ("star", 1),
    ("cycle-clique", 2),
    ("cycle-two-cliques", 3),
    ("barbell", 2),
    ("path-clique-star", 2),
    ("bridged-cliques", 1),
    ("clique-chain", 2),
];

pub fn by_name(family: &str, params: &[usize]) -> Result<Graph, GraphError> {
    let arity = FAMILIES
        .iter()
        .find(|(name, _)| *name == family)
        .map(|&(_, a)| a)
        .ok_or_else(|| GraphError::InvalidParameter(format!("unknown family {family:?}")))?;
    need(params.len() == arity, &format!("{family} takes {arity} parameter(s)"))?;
    let p = params;
    match family {
        "cycle" => cycle(p[0]),
        "clique" => clique(p[0]),
        "path" => path(p[0]),
        "star" => star(p[0]),
        "cycle-clique" => cycle_clique(p[0], p[1]),
        "cycle-two-cliques" => cycle_two_cliques(p[0], p[1], p[2]),
        "barbell" => barbell(p[0], p[1]),
        "path-clique-star" => path_clique_star(p[0], p[1]),
        "bridged-cliques" => bridged_cliques(p[0]),
        _ => clique_chain(p[0], p[1]),
    }
}
