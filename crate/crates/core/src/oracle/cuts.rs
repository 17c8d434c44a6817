use super::OracleError;
use crate::graph::{CutSet, Graph};

pub const MAX_SPARSEST_CUT_N: usize = 24;
pub const MAX_K_WAY_N: usize = 12;

fn ratio(cut: f64, vol: f64) -> f64 {
    if cut <= 0.0 {
        0.0
    } else {
        cut / vol
    }
}

/// Exact conductance by enumerating every cut. Sets never contain vertex
/// `n - 1`, so each cut is seen once through its smaller bitmask; ties go to
/// the smallest bitmask.
pub fn brute_force_sparsest_cut(g: &Graph) -> Result<(CutSet, f64), OracleError> {
    let n = g.n();
    if n > MAX_SPARSEST_CUT_N {
        return Err(OracleError::TooLarge { what: "brute_force_sparsest_cut", n, limit: MAX_SPARSEST_CUT_N });
    }
    if n < 2 {
        return Err(OracleError::TooSmall(n));
    }
    let total = g.degrees().iter().sum::<f64>();
    let mut inside = vec![false; n];
    let (mut mask, mut cut, mut vol) = (0u32, 0.0f64, 0.0f64);
    let mut best = (f64::INFINITY, u32::MAX);
    for i in 1u32..(1u32 << (n - 1)) {
        let v = i.trailing_zeros() as usize;
        let entering = !inside[v];
        for &(u, w) in g.neighbors(v) {
            if inside[u] == entering {
                cut -= w;
            } else {
                cut += w;
            }
        }
        inside[v] = entering;
        mask ^= 1 << v;
        vol += if entering { g.degree(v) } else { -g.degree(v) };
        let phi = ratio(cut, vol.min(total - vol));
        let tied = (phi - best.0).abs() <= 1e-12 * best.0.max(f64::MIN_POSITIVE);
        if (phi < best.0 && !tied) || (tied && mask < best.1) {
            best = (phi, mask);
        }
    }
    let set = CutSet::from_mask(n, best.1 as u64).expect("nonzero proper mask");
    let phi = g.sparsity(&set);
    Ok((set, phi))
}

/// Conductance of the unit-weight path on `n` vertices, `1 / (2 floor(n/2) - 1)`.
/// A prefix cut is optimal: one cut edge against at most `n - 1` volume, and
/// two cut edges already give at least `2 / (n - 1)`.
pub fn path_conductance(n: usize) -> Result<f64, OracleError> {
    if n < 2 {
        return Err(OracleError::TooSmall(n));
    }
    Ok(1.0 / (2 * (n / 2) - 1) as f64)
}

/// Exact `k`-way conductance: the minimum over `k` disjoint non-empty sets of
/// the largest `w(S, V \ S) / vol(S)`. Sets need not cover `V`.
pub fn brute_force_k_way(g: &Graph, k: usize) -> Result<f64, OracleError> {
    let n = g.n();
    if n > MAX_K_WAY_N {
        return Err(OracleError::TooLarge { what: "brute_force_k_way", n, limit: MAX_K_WAY_N });
    }
    if !(2..=4).contains(&k) || k > n {
        return Err(OracleError::BadK(k));
    }
    let size = 1usize << n;
    let mut part = vec![0.0f64; size];
    for (mask, slot) in part.iter_mut().enumerate().skip(1) {
        let mut cut = 0.0;
        let mut vol = 0.0;
        for v in (0..n).filter(|&v| mask >> v & 1 == 1) {
            vol += g.degree(v);
            cut += g.neighbors(v).iter().filter(|&&(u, _)| mask >> u & 1 == 0).map(|&(_, w)| w).sum::<f64>();
        }
        *slot = ratio(cut, vol);
    }
    // best[m]: optimum using j sets inside m, for the current j
    let mut prev = vec![0.0f64; size];
    for _ in 1..=k {
        let mut best = vec![f64::INFINITY; size];
        for mask in 1..size {
            let low = mask & mask.wrapping_neg();
            let mut value = best[mask ^ low];
            let rest = mask ^ low;
            let mut sub = rest;
            loop {
                let chosen = sub | low;
                let candidate = part[chosen].max(prev[mask ^ chosen]);
                if candidate < value {
                    value = candidate;
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
            best[mask] = value;
        }
        prev = best;
    }
    Ok(prev[size - 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generators, GraphMode};

    #[test]
    fn frozen_conductances() {
        let (s, phi) = brute_force_sparsest_cut(&generators::bridged_cliques(4).unwrap()).unwrap();
        assert!((phi - 1.0 / 13.0).abs() < 1e-15);
        assert_eq!(s.members(), &[0, 1, 2, 3]);
        let (_, phi) = brute_force_sparsest_cut(&generators::clique(4).unwrap()).unwrap();
        assert!((phi - 2.0 / 3.0).abs() < 1e-15);
        let (s, phi) = brute_force_sparsest_cut(&generators::cycle(4).unwrap()).unwrap();
        assert_eq!(phi, 0.5);
        assert_eq!(s.members(), &[0, 1]);
        let (_, phi) = brute_force_sparsest_cut(&generators::clique(8).unwrap()).unwrap();
        assert!((phi - 4.0 / 7.0).abs() < 1e-15);
        let (_, phi) = brute_force_sparsest_cut(&generators::star(8).unwrap()).unwrap();
        assert_eq!(phi, 1.0);
        let (_, phi) = brute_force_sparsest_cut(&generators::bridged_cliques(3).unwrap()).unwrap();
        assert!((phi - 1.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn path_formula_matches_enumeration() {
        for n in 2..=16 {
            let (_, phi) = brute_force_sparsest_cut(&generators::path(n).unwrap()).unwrap();
            assert!((phi - path_conductance(n).unwrap()).abs() < 1e-15, "n = {n}");
        }
        assert!(path_conductance(1).is_err());
    }

    #[test]
    fn tie_break_is_smallest_mask() {
        let (s, _) = brute_force_sparsest_cut(&generators::clique(4).unwrap()).unwrap();
        assert_eq!(s.mask(), 0b0011);
    }

    #[test]
    fn k_way_examples() {
        let tri = generators::clique(3).unwrap();
        let three = tri.disjoint_union(&tri).disjoint_union(&tri);
        assert_eq!(brute_force_k_way(&three, 3).unwrap(), 0.0);
        let chain = generators::clique_chain(3, 3).unwrap();
        assert!((brute_force_k_way(&chain, 2).unwrap() - 1.0 / 7.0).abs() < 1e-15);
        assert!((brute_force_k_way(&chain, 3).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn k_way_two_matches_sparsest_cut() {
        let graphs = [
            generators::clique(5).unwrap(),
            generators::cycle(7).unwrap(),
            generators::path(9).unwrap(),
            generators::star(6).unwrap(),
            generators::barbell(4, 3).unwrap(),
            generators::cycle_clique(5, 4).unwrap(),
            Graph::from_edges(4, [(0, 1, 3.0), (1, 2, 0.5), (2, 3, 2.0), (0, 3, 1.0)], GraphMode::Strict).unwrap(),
        ];
        for g in &graphs {
            let a = brute_force_k_way(g, 2).unwrap();
            let (_, b) = brute_force_sparsest_cut(g).unwrap();
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn bounds() {
        assert!(brute_force_sparsest_cut(&generators::cycle(25).unwrap()).is_err());
        assert!(brute_force_k_way(&generators::cycle(13).unwrap(), 2).is_err());
        assert_eq!(brute_force_k_way(&generators::cycle(6).unwrap(), 5), Err(OracleError::BadK(5)));
        assert_eq!(brute_force_k_way(&generators::cycle(6).unwrap(), 1), Err(OracleError::BadK(1)));
    }
}
