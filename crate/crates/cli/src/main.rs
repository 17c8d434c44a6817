mod bench;
mod estimate;
mod exact;
mod input;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use congest_spectral::congest::EngineError;
use congest_spectral::cut::CutError;
use congest_spectral::spectral::SpectralError;

/// Distributed spectral estimation on a simulated Broadcast CONGEST network.
#[derive(Debug, Parser)]
#[command(name = "congest-spectral", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a generated graph as an edge list.
    Gen {
        /// One of cycle, clique, path, star, cycle-clique, cycle-two-cliques,
        /// barbell, path-clique-star, bridged-cliques, clique-chain.
        family: String,
        params: Vec<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exact spectrum, conductance and Cheeger check from the dense oracles.
    Exact {
        /// Edge-list file, `-` for stdin, or `family:p1,p2`.
        graph: String,
        /// Also compute `phi_j` for `j = 2..=K`.
        #[arg(long)]
        k: Option<usize>,
    },
    /// One distributed estimation run, reported as a JSON record.
    Estimate(estimate::EstimateArgs),
    /// Sweep sizes and seeds of one family and write CSV rows.
    Bench(bench::BenchArgs),
    /// Check the oracle invariants and the estimator guarantees on the bundled fixtures.
    Verify(verify::VerifyArgs),
}

/// Flags shared by the commands that run the power method.
#[derive(Debug, Clone, Args)]
pub struct PowerArgs {
    #[arg(long, env = "CONGEST_SPECTRAL_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Per-message budget; defaults to `32 ceil(log2 n)`.
    #[arg(long)]
    pub budget_bits: Option<u32>,
    /// Mantissa bits per message; defaults to `2 ceil(log2 n) + 8`.
    #[arg(long)]
    pub mantissa: Option<u32>,
    /// Send full 53-bit mantissas.
    #[arg(long)]
    pub full_precision: bool,
    #[arg(long)]
    pub max_rounds: Option<u64>,
    #[arg(long)]
    pub max_restarts: Option<u32>,
    #[arg(long)]
    pub c1: Option<f64>,
    #[arg(long)]
    pub c2: Option<f64>,
    #[arg(long)]
    pub c3: Option<f64>,
    #[arg(long)]
    pub c4: Option<f64>,
}

impl PowerArgs {
    pub fn config(&self, eps: f64) -> congest_spectral::spectral::PowerConfig {
        use congest_spectral::spectral::{PowerConfig, Precision};
        let d = PowerConfig::default();
        PowerConfig {
            eps,
            c1: self.c1.unwrap_or(d.c1),
            c2: self.c2.unwrap_or(d.c2),
            c3: self.c3.unwrap_or(d.c3),
            c4: self.c4.unwrap_or(d.c4),
            mantissa_bits: self.mantissa,
            budget_bits: self.budget_bits,
            precision: if self.full_precision { Precision::Full } else { Precision::Truncated },
            max_rounds: self.max_rounds.unwrap_or(d.max_rounds),
            max_restarts: self.max_restarts.unwrap_or(d.max_restarts),
            seed: self.seed,
        }
    }
}

fn spectral_code(e: &SpectralError) -> u8 {
    match e {
        SpectralError::Engine(EngineError::BudgetViolation { .. }) => 2,
        SpectralError::RestartsExhausted { .. } => 3,
        _ => 1,
    }
}

/// 2 for a budget violation, 3 for restart exhaustion, 1 otherwise.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<SpectralError>() {
            return spectral_code(e);
        }
        if let Some(CutError::Spectral(e)) = cause.downcast_ref::<CutError>() {
            return spectral_code(e);
        }
        if let Some(EngineError::BudgetViolation { .. }) = cause.downcast_ref::<EngineError>() {
            return 2;
        }
    }
    1
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Gen { family, params, output } => {
            let g = congest_spectral::graph::generators::by_name(&family, &params)?;
            output::write_text(output.as_deref(), &g.to_edge_list())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Exact { graph, k } => exact::run(&graph, k),
        Command::Estimate(args) => estimate::run(&args),
        Command::Bench(args) => bench::run(&args),
        Command::Verify(args) => verify::run(&args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Exit code 2 is reserved for budget violations.
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
