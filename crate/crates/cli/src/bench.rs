use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{bail, Context};
use clap::Args;
use congest_spectral::graph::{generators, Graph};
use congest_spectral::oracle::MAX_EIGEN_N;
use congest_spectral::spectral::PowerConfig;
use serde::Serialize;

use crate::estimate::{cut_config, execute, oracle_check, Target};
use crate::output::sig10;
use crate::{input, PowerArgs};

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub family: String,
    /// `a..b` for the powers of two from `a` to `b`, or a list `a,b,c`.
    #[arg(long)]
    pub sizes: String,
    /// Extra generator parameters placed after the size, e.g. `4` for barbell.
    #[arg(long, default_value = "")]
    pub params: String,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Number of seeds per size, counting up from `--seed`.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    /// `lambda_n`, `lambda_2`, `lambda_k K`, `phi` or `phi_k K`.
    #[arg(long, num_args = 1..=2, default_values = ["lambda_2"], value_names = ["TARGET", "K"])]
    pub target: Vec<String>,
    /// Skip the oracle columns.
    #[arg(long)]
    pub no_oracle: bool,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// CSV destination, stdout when absent or `-`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub power: PowerArgs,
}

#[derive(Debug, Clone, Serialize)]
struct Row {
    family: String,
    size: usize,
    n: usize,
    eps: f64,
    seed: u64,
    rounds: u64,
    bits: u32,
    budget: u32,
    value: f64,
    oracle_value: Option<f64>,
    sandwich_ok: Option<bool>,
}

pub fn parse_sizes(text: &str) -> anyhow::Result<Vec<usize>> {
    if let Some((a, b)) = text.split_once("..") {
        let a: usize = a.trim().parse().with_context(|| format!("bad size {a:?}"))?;
        let b: usize = b.trim().parse().with_context(|| format!("bad size {b:?}"))?;
        if a == 0 || a > b {
            bail!("empty size range {text:?}");
        }
        return Ok(std::iter::successors(Some(a), |&s| s.checked_mul(2)).take_while(|&s| s <= b).collect());
    }
    let sizes = input::parse_params(text)?;
    if sizes.is_empty() {
        bail!("no sizes given");
    }
    Ok(sizes)
}

fn cell(args: &BenchArgs, target: Target, graph: &Graph, size: usize, seed: u64) -> anyhow::Result<Row> {
    let power = args.power.config(args.eps);
    let cut = cut_config(PowerConfig { seed, ..power.clone() }, 1.0, None);
    let eps = match target {
        Target::Phi => None,
        _ => Some(args.eps),
    };
    let outcome = execute(graph, target, eps, &cut).with_context(|| format!("size {size}, seed {seed}"))?;
    let stats = outcome.stats();
    let (oracle_value, sandwich_ok) = if args.no_oracle || graph.n() > MAX_EIGEN_N {
        (None, None)
    } else {
        match oracle_check(graph, target, args.eps, &outcome) {
            Ok((exact, ok)) => (exact.last().copied().map(sig10), Some(ok)),
            Err(_) => (None, None),
        }
    };
    Ok(Row {
        family: args.family.clone(),
        size,
        n: graph.n(),
        eps: args.eps,
        seed,
        rounds: stats.rounds,
        bits: stats.max_message_bits,
        budget: power.budget(graph.n()),
        value: sig10(outcome.value()),
        oracle_value,
        sandwich_ok,
    })
}

pub fn run(args: &BenchArgs) -> anyhow::Result<ExitCode> {
    let target = Target::parse(&args.target)?;
    args.power.config(args.eps).validate()?;
    let extra = input::parse_params(&args.params)?;
    let mut graphs = Vec::new();
    for size in parse_sizes(&args.sizes)? {
        let params: Vec<usize> = std::iter::once(size).chain(extra.iter().copied()).collect();
        graphs.push((size, generators::by_name(&args.family, &params)?));
    }
    let cells: Vec<(usize, u64)> = (0..graphs.len())
        .flat_map(|i| (0..args.seeds).map(move |s| (i, args.power.seed + s)))
        .collect();
    let jobs = args
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get()))
        .clamp(1, cells.len().max(1));
    let next = AtomicUsize::new(0);
    let rows = Mutex::new(Vec::with_capacity(cells.len()));
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(g, seed)) = cells.get(i) else { break };
                let (size, graph) = &graphs[g];
                let row = cell(args, target, graph, *size, seed);
                rows.lock().expect("no worker panicked").push((i, row));
            });
        }
    });
    let mut rows = rows.into_inner().expect("no worker panicked");
    rows.sort_by_key(|(i, _)| *i);
    let mut out: Box<dyn std::io::Write> = match &args.output {
        Some(p) if p.as_os_str() != "-" => {
            Box::new(std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?)
        }
        _ => Box::new(std::io::stdout().lock()),
    };
    let mut writer = csv::Writer::from_writer(&mut out);
    for (_, row) in rows {
        writer.serialize(row?)?;
    }
    writer.flush()?;
    Ok(ExitCode::SUCCESS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_ranges() {
        assert_eq!(parse_sizes("16..256").unwrap(), vec![16, 32, 64, 128, 256]);
        assert_eq!(parse_sizes("3..20").unwrap(), vec![3, 6, 12]);
        assert_eq!(parse_sizes("8,12").unwrap(), vec![8, 12]);
        assert!(parse_sizes("9..4").is_err());
        assert!(parse_sizes("").is_err());
    }
}
