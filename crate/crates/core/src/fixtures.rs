//! Named graphs shared by the tests, the benches and the command line.

use crate::graph::{generators, Graph};

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub graph: Graph,
}

fn fixture(name: &'static str, graph: Result<Graph, crate::graph::GraphError>) -> Fixture {
    Fixture { name, graph: graph.expect("fixture parameters are valid") }
}

/// Connected fixtures with `n <= 16`, small enough for every oracle.
pub fn small_connected() -> Vec<Fixture> {
    vec![
        fixture("K2", generators::clique(2)),
        fixture("K3", generators::clique(3)),
        fixture("K4", generators::clique(4)),
        fixture("K8", generators::clique(8)),
        fixture("C4", generators::cycle(4)),
        fixture("C5", generators::cycle(5)),
        fixture("C8", generators::cycle(8)),
        fixture("C12", generators::cycle(12)),
        fixture("P3", generators::path(3)),
        fixture("P8", generators::path(8)),
        fixture("P16", generators::path(16)),
        fixture("star4", generators::star(4)),
        fixture("star8", generators::star(8)),
        fixture("barbell(4,3)", generators::barbell(4, 3)),
        fixture("barbell(6,4)", generators::barbell(6, 4)),
        fixture("bridged_cliques(3)", generators::bridged_cliques(3)),
        fixture("bridged_cliques(4)", generators::bridged_cliques(4)),
        fixture("clique_chain(3,3)", generators::clique_chain(3, 3)),
        fixture("G(6,4)", generators::cycle_clique(6, 4)),
        fixture("G(8,8)", generators::cycle_clique(8, 8)),
        fixture("G(5,3,3)", generators::cycle_two_cliques(5, 3, 3)),
        fixture("path_clique_star(5,4)", generators::path_clique_star(5, 4)),
    ]
}

/// Two triangles joined by one edge.
pub fn two_triangles() -> Graph {
    generators::bridged_cliques(3).expect("valid")
}

/// Looks a fixture up by name among [`small_connected`] and the larger
/// `C64`, `K64`.
pub fn by_name(name: &str) -> Option<Graph> {
    match name {
        "C64" => generators::cycle(64).ok(),
        "K64" => generators::clique(64).ok(),
        "C32" => generators::cycle(32).ok(),
        _ => small_connected().into_iter().find(|f| f.name == name).map(|f| f.graph),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_small_and_connected() {
        let all = small_connected();
        assert!(all.len() >= 15);
        for f in &all {
            assert!(f.graph.n() <= 16, "{}", f.name);
            assert!(f.graph.is_connected(), "{}", f.name);
        }
        let mut names: Vec<_> = all.iter().map(|f| f.name).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), all.len());
    }

    #[test]
    fn lookup() {
        assert_eq!(by_name("K8").unwrap().n(), 8);
        assert_eq!(by_name("C64").unwrap().n(), 64);
        assert_eq!(two_triangles().n(), 6);
        assert!(by_name("nope").is_none());
    }
}
