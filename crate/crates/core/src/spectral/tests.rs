use super::*;
use crate::graph::generators;
use crate::oracle::laplacian_spectrum;
use proptest::prelude::*;

fn lambdas(g: &Graph) -> Vec<f64> {
    laplacian_spectrum(g, false).unwrap().values
}

fn cfg(eps: f64, seed: u64) -> PowerConfig {
    PowerConfig::new(eps).with_seed(seed)
}

fn within(x: f64, lo: f64, hi: f64) -> bool {
    x >= lo - 1e-9 && x <= hi + 1e-9
}

#[test]
fn start_vector_is_reproducible() {
    let a = sample_start_vector(4, 17);
    assert_eq!(a, sample_start_vector(4, 17));
    assert!(a.iter().all(|&x| x == 1.0 || x == -1.0));
    let differs = (0..20).any(|s| sample_start_vector(16, s) != sample_start_vector(16, s + 100));
    assert!(differs);
}

#[test]
fn start_vector_mean_is_zero() {
    let mut sum = 0.0;
    let mut count = 0.0;
    for seed in 0..10_000 {
        for x in sample_start_vector(4, seed) {
            sum += x;
            count += 1.0;
        }
    }
    let sigma = 1.0 / f64::sqrt(count);
    assert!((sum / count).abs() <= 3.0 * sigma);
}

#[test]
fn instance_seeds_are_distinct() {
    let mut seen = std::collections::HashSet::new();
    for level in 0..4 {
        for i in 0..8 {
            for r in 0..3 {
                assert!(seen.insert(instance_seed(5, level, i, r)));
            }
        }
    }
}

#[test]
fn config_formulas() {
    let c = PowerConfig::new(0.05);
    let n = 64;
    let ln = (64f64).ln();
    assert_eq!(c.iterations(n), (4.0 * ln / 0.05).ceil() as u64);
    assert_eq!(c.instances(n), (3.0 * ln).ceil() as usize);
    assert_eq!(c.probe_threshold(n, 3), (8.0 * 3.0 * ln / 0.05).ceil() as u64);
    assert_eq!(c.projection_period(n), 5);
    assert_eq!(c.mantissa(n), 20);
    assert_eq!(c.clone().with_precision(Precision::Full).mantissa(n), 53);
    assert_eq!(c.budget(n), 192);
    assert!(c.meets_precondition(400));
    assert!(!c.meets_precondition(16));
    assert!(c.validate().is_ok());
    assert!(PowerConfig::new(0.0).validate().is_err());
    assert!(PowerConfig { c2: -1.0, ..c.clone() }.validate().is_err());
    assert!(PowerConfig { mantissa_bits: Some(1), ..c }.validate().is_err());
}

#[test]
fn cascade_accuracy_schedule() {
    assert!((cascade_accuracy(0.1, 3, 2) - 0.001 / 60.0).abs() < 1e-15);
    assert!((cascade_accuracy(0.1, 3, 3) - 0.1 / 2.1).abs() < 1e-15);
}

#[test]
fn rayleigh_of_null_vector_is_two() {
    let g = generators::cycle_clique(6, 4).unwrap();
    let c = PowerConfig::new(0.1);
    let (v, stats) = rayleigh(&g, &g.sqrt_degrees(), &c).unwrap();
    let b = c.mantissa(g.n()) as i32;
    assert!(v <= 2.0 && v >= 2.0 - 2f64.powi(4 - b), "{v}");
    assert!(stats.rounds > 0);
}

#[test]
fn rayleigh_never_exceeds_top() {
    let k2 = generators::clique(2).unwrap();
    let g = generators::barbell(4, 3).unwrap();
    let top = 2.0 - lambdas(&g)[0];
    let c = PowerConfig::new(0.1);
    for seed in 0..1000u64 {
        let x: Vec<f64> = (0..g.n()).map(|v| start_sign(seed, v) * (1.0 + (v as f64) * 0.1)).collect();
        let (r, _) = rayleigh(&g, &x, &c).unwrap();
        assert!(r <= top + 1e-9, "{r}");
        if seed < 50 {
            let (r, _) = rayleigh(&k2, &[start_sign(seed, 0), 0.5], &c).unwrap();
            assert!((0.0..=2.0).contains(&r));
        }
    }
}

#[test]
fn rayleigh_rejects_wrong_length() {
    let g = generators::cycle(4).unwrap();
    assert!(matches!(rayleigh(&g, &[1.0], &PowerConfig::default()), Err(SpectralError::Length { .. })));
}

#[test]
fn lambda_n_examples() {
    let c4 = generators::cycle(4).unwrap();
    let k4 = generators::clique(4).unwrap();
    let star = generators::star(8).unwrap();
    for seed in 0..3 {
        let e = estimate_lambda_n(&c4, &cfg(0.05, seed)).unwrap();
        assert!(within(e.value, 1.9, 2.0), "{}", e.value);
        let e = estimate_lambda_n(&k4, &cfg(0.05, seed)).unwrap();
        assert!(within(e.value, 0.95 * 4.0 / 3.0, 4.0 / 3.0), "{}", e.value);
        let e = estimate_lambda_n(&star, &cfg(0.05, seed)).unwrap();
        assert!(within(e.value, 1.9, 2.0), "{}", e.value);
    }
}

#[test]
fn lambda_2_examples() {
    let p3 = generators::path(3).unwrap();
    for seed in 0..3 {
        let e = estimate_lambda_2(&generators::cycle(4).unwrap(), &cfg(0.05, seed)).unwrap();
        assert!(within(e.value, 1.0, 1.05), "{}", e.value);
        let e = estimate_lambda_2(&generators::clique(4).unwrap(), &cfg(0.05, seed)).unwrap();
        assert!(within(e.value, 4.0 / 3.0, 4.0 / 3.0 + 0.05), "{}", e.value);
        let e = estimate_lambda_2(&p3, &cfg(0.05, seed)).unwrap();
        assert!(within(e.value, 1.0, 1.05), "{}", e.value);
        assert!(!e.early_exit);
    }
}

#[test]
fn estimate_shape() {
    let g = generators::barbell(4, 3).unwrap();
    let e = estimate_lambda_2(&g, &cfg(0.1, 4)).unwrap();
    let v = e.vector.as_ref().unwrap();
    assert_eq!(v.len(), g.n());
    assert!((v.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-6);
    assert!(e.instance_id.unwrap() < e.instances);
    assert_eq!(e.log.len(), e.instances);
    assert_eq!(e.iterations, PowerConfig::new(0.05).iterations(g.n()));
    let diam = g.diameter().unwrap() as u64;
    assert!(e.stats.rounds >= e.iterations * e.instances as u64 + diam);
    let json = serde_json::to_value(e.summary()).unwrap();
    assert_eq!(json["which"], "lambda_2");
    for key in ["value", "eps", "rounds", "instances", "early_exit", "restarts"] {
        assert!(json.get(key).is_some(), "{key}");
    }
}

#[test]
fn early_exit_on_long_path() {
    let g = generators::path(256).unwrap();
    let e = estimate_lambda_2(&g, &cfg(0.5, 1)).unwrap();
    assert!(e.early_exit);
    assert_eq!(e.value, 1.0);
    assert!(e.vector.is_none());
    let ks = estimate_smallest_k(&generators::path(1024).unwrap(), 3, &cfg(0.5, 1)).unwrap();
    assert_eq!(ks.iter().map(|e| e.value).collect::<Vec<_>>(), vec![0.0, 0.5, 0.5]);
    assert!(ks.iter().all(|e| e.early_exit));
}

#[test]
fn smallest_k_on_k4() {
    let g = generators::clique(4).unwrap();
    let out = estimate_smallest_k(&g, 3, &cfg(0.1, 2)).unwrap();
    assert_eq!(out.len(), 3);
    assert_eq!(out[0].value, 0.0);
    assert_eq!(out[0].which, Which::Lambda(1));
    let v1 = out[0].vector.as_ref().unwrap();
    assert!(v1.iter().all(|&x| (x - 0.5).abs() < 1e-12));
    for e in &out[1..] {
        assert!(within(e.value, 4.0 / 3.0, 4.0 / 3.0 + 0.1), "{}", e.value);
    }
    assert_eq!(out[2].deflation.len(), 1);
    let stored = &out[2].deflation[0].vector;
    let tol = 4.0 * 2f64.powi(-(out[2].mantissa_bits as i32));
    assert!((stored.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < tol);
    assert!(stored[0] >= 0.0);
    let dot: f64 = stored.iter().zip(v1).map(|(a, b)| a * b).sum();
    assert!(dot.abs() < tol);
}

#[test]
fn smallest_k_on_two_triangles() {
    let g = generators::bridged_cliques(3).unwrap();
    let exact = lambdas(&g);
    let out = estimate_smallest_k(&g, 3, &cfg(0.1, 7)).unwrap();
    for (i, e) in out.iter().enumerate() {
        assert!(within(e.value, exact[i] - 1e-6, exact[i] + 0.1 + 1e-6), "{i}: {} vs {}", e.value, exact[i]);
    }
}

#[test]
fn smallest_k_rejects_bad_k() {
    let g = generators::clique(4).unwrap();
    assert!(matches!(estimate_smallest_k(&g, 0, &cfg(0.1, 0)), Err(SpectralError::BadK { .. })));
    assert!(matches!(estimate_smallest_k(&g, 5, &cfg(0.1, 0)), Err(SpectralError::BadK { .. })));
    let big = generators::cycle(20).unwrap();
    assert!(matches!(estimate_smallest_k(&big, 9, &cfg(0.1, 0)), Err(SpectralError::BadK { .. })));
}

#[test]
fn vanished_instances_restart() {
    // A constant start on a regular graph is all null vector.
    let g = generators::clique(4).unwrap();
    let mut restarted = false;
    for seed in 0..40 {
        let e = estimate_lambda_2(&g, &cfg(0.05, seed)).unwrap();
        assert!(within(e.value, 4.0 / 3.0, 4.0 / 3.0 + 0.05), "{}", e.value);
        assert_eq!(e.log.len(), e.instances);
        restarted |= e.restarts > 0;
    }
    assert!(restarted);
}

#[test]
fn restart_exhaustion_is_an_error() {
    // On K2, 2I - L annihilates everything orthogonal to sqrt(deg).
    let g = generators::clique(2).unwrap();
    for seed in 0..5 {
        let err = estimate_lambda_2(&g, &cfg(0.05, seed)).unwrap_err();
        assert!(matches!(err, SpectralError::RestartsExhausted { .. }), "{err:?}");
    }
    assert!(estimate_lambda_n(&g, &cfg(0.05, 0)).is_ok());
}

#[test]
fn tight_budget_violates_once() {
    let g = generators::cycle(8).unwrap();
    let c = cfg(0.1, 0);
    let t = c.iterations(8);
    let f = c.format(8, t).unwrap();
    let tight = PowerConfig { budget_bits: Some(f.value_bits() - 1), ..c };
    match estimate_lambda_n(&g, &tight) {
        Err(SpectralError::Engine(EngineError::BudgetViolation { width, budget, .. })) => {
            assert_eq!(width, f.value_bits());
            assert_eq!(budget, width - 1);
        }
        other => panic!("expected a violation, got {other:?}"),
    }
}

#[test]
fn boosting_is_monotone_in_instances() {
    let g = generators::barbell(4, 3).unwrap();
    let mut prev_n = f64::NEG_INFINITY;
    let mut prev_2 = f64::INFINITY;
    for c2 in [0.5, 1.0, 2.0, 3.0, 4.0] {
        let c = PowerConfig { c2, ..cfg(0.2, 11) };
        let ln = estimate_lambda_n(&g, &c).unwrap().value;
        let l2 = estimate_lambda_2(&g, &c).unwrap().value;
        assert!(ln >= prev_n && l2 <= prev_2);
        prev_n = ln;
        prev_2 = l2;
    }
}

#[test]
fn projection_drift_is_small() {
    for g in [generators::clique(8).unwrap(), generators::cycle(8).unwrap()] {
        let c = cfg(0.05, 3);
        let b = c.mantissa(g.n()) as i32;
        let e = estimate_lambda_2(&g, &c).unwrap();
        assert!(!e.drift.is_empty());
        let worst = e.drift.iter().cloned().fold(0.0, f64::max);
        assert!(worst <= 2f64.powf(-b as f64 / 2.0), "{worst}");
    }
}

#[test]
fn full_precision_mode() {
    let g = generators::cycle(64).unwrap();
    let trunc = estimate_lambda_n(&g, &cfg(0.1, 5)).unwrap();
    let full = estimate_lambda_n(&g, &cfg(0.1, 5).with_precision(Precision::Full)).unwrap();
    assert_eq!(full.mantissa_bits, 53);
    assert!((trunc.value - full.value).abs() <= 1e-3 * full.value);
    assert!(full.stats.max_message_bits > trunc.stats.max_message_bits);
}

#[test]
fn which_labels() {
    assert_eq!(Which::LambdaN.label(), "lambda_n");
    assert_eq!(Which::Lambda(2).label(), "lambda_2");
    assert_eq!(serde_json::to_string(&Which::Lambda(5)).unwrap(), "\"lambda_5\"");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn one_sided_estimates(k in 3usize..9, l in 2usize..5, seed in 0u64..1000) {
        let g = generators::cycle_clique(k, l).unwrap();
        let exact = lambdas(&g);
        let c = cfg(0.3, seed);
        let top = estimate_lambda_n(&g, &c).unwrap();
        prop_assert!(top.value <= exact[g.n() - 1] + 1e-9);
        for entry in &top.log {
            prop_assert!(entry.rayleigh <= exact[g.n() - 1] + 1e-9);
        }
        let second = estimate_lambda_2(&g, &c).unwrap();
        prop_assert!(second.value >= exact[1] - 1e-9);
        for entry in &second.log {
            prop_assert!(entry.rayleigh <= 2.0 - exact[1] + 1e-9);
        }
    }
}
