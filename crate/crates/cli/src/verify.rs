use std::process::ExitCode;

use clap::Args;
use congest_spectral::fixtures::small_connected;
use congest_spectral::graph::Graph;
use congest_spectral::oracle::{brute_force_k_way, brute_force_sparsest_cut, cheeger_check, laplacian_spectrum};
use congest_spectral::spectral::{estimate_lambda_2, estimate_lambda_n};

use crate::PowerArgs;

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[command(flatten)]
    pub power: PowerArgs,
}

const TOL: f64 = 1e-6;

fn checks(g: &Graph, args: &VerifyArgs) -> anyhow::Result<Vec<(&'static str, bool)>> {
    let n = g.n();
    let s = laplacian_spectrum(g, false)?;
    let trace: f64 = s.values.iter().sum();
    let mut out = vec![
        ("spectrum range", s.lambda(1).abs() <= 1e-9 && s.largest() <= 2.0 + 1e-9),
        ("trace", (trace - n as f64).abs() <= 1e-8),
        ("cheeger sandwich", cheeger_check(g, None)?.ok()),
    ];
    if n <= 10 {
        out.push(("two-way equals sparsest cut", (brute_force_k_way(g, 2)? - brute_force_sparsest_cut(g)?.1).abs() <= 1e-12));
    }
    let cfg = args.power.config(args.eps);
    let top = estimate_lambda_n(g, &cfg)?.value;
    out.push(("lambda_n estimate", top >= (1.0 - args.eps) * s.largest() - TOL && top <= s.largest() + TOL));
    // On K2 the deflated operator is zero, so lambda_2 has no instance to run.
    if n > 2 {
        let second = estimate_lambda_2(g, &cfg)?.value;
        out.push(("lambda_2 estimate", second >= s.lambda(2) - TOL && second <= s.lambda(2) + args.eps + TOL));
    }
    Ok(out)
}

pub fn run(args: &VerifyArgs) -> anyhow::Result<ExitCode> {
    args.power.config(args.eps).validate()?;
    let mut failed = 0;
    let mut total = 0;
    for f in small_connected() {
        for (name, ok) in checks(&f.graph, args)? {
            total += 1;
            if !ok {
                failed += 1;
            }
            println!("{} {}: {name}", if ok { "ok  " } else { "FAIL" }, f.name);
        }
    }
    println!("{} of {total} checks passed", total - failed);
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
