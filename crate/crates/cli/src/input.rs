use std::io::Read;
use std::path::Path;

use anyhow::{bail, Context};
use congest_spectral::graph::{generators, Graph, GraphMode};

/// Loads a graph from an edge-list file, stdin (`-`), or a generator spec
/// `family:p1,p2,...` when no such file exists.
pub fn load(source: &str, mode: GraphMode) -> anyhow::Result<Graph> {
    if source == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text).context("reading stdin")?;
        return Ok(Graph::parse_edge_list(&text, mode)?);
    }
    let path = Path::new(source);
    if path.exists() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {source}"))?;
        return Graph::parse_edge_list(&text, mode).with_context(|| format!("parsing {source}"));
    }
    match source.split_once(':') {
        Some((family, params)) => {
            let params = parse_params(params)?;
            let g = generators::by_name(family, &params)?;
            if mode == GraphMode::Strict && !g.is_connected() {
                bail!("{source} is disconnected");
            }
            Ok(g)
        }
        None => bail!("{source}: no such file"),
    }
}

pub fn parse_params(text: &str) -> anyhow::Result<Vec<usize>> {
    text.split(',')
        .filter(|s| !s.is_empty())
        .map(|s| s.trim().parse::<usize>().with_context(|| format!("bad parameter {s:?}")))
        .collect()
}
