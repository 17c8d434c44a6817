//! Inputs shared by the criterion benches.

use congest_spectral::graph::{generators, Graph};
use congest_spectral::spectral::PowerConfig;

/// Workloads named `family/size`, small enough for a quick bench run.
pub fn workloads() -> Vec<(String, Graph)> {
    let mut out = Vec::new();
    for n in [16, 64, 256] {
        out.push((format!("cycle/{n}"), generators::cycle(n).expect("valid size")));
    }
    for n in [16, 64] {
        out.push((format!("clique/{n}"), generators::clique(n).expect("valid size")));
    }
    out.push(("barbell/6,4".into(), generators::barbell(6, 4).expect("valid size")));
    out
}

pub fn config(eps: f64) -> PowerConfig {
    PowerConfig::new(eps).with_seed(1)
}

/// Deterministic values in `[-1, 1)` for the numeric benches.
pub fn values(count: usize) -> Vec<f64> {
    let mut z = 0x2545_f491_4f6c_dd1du64;
    (0..count)
        .map(|_| {
            z ^= z << 13;
            z ^= z >> 7;
            z ^= z << 17;
            (z >> 11) as f64 / (1u64 << 52) as f64 - 1.0
        })
        .collect()
}
