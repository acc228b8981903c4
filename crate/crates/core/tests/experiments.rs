use qembed::experiments::{
    embed_experiment, fingerprint_demo, jl_baseline, lower_bound_table, recompute_row,
    standard_pairs, two_norm_experiment, EmbedParams, FingerprintParams, JlParams, StateFamily,
    TwoNormParams,
};
use qembed::sampling::RngStream;
use qembed::verifiers::Verdict;

#[test]
fn compressed_fingerprints_stay_nearly_orthogonal() {
    let seeds = 20;
    let good = (0..seeds)
        .filter(|&seed| {
            let p = FingerprintParams {
                k_strings: 64,
                dim_compressed: 32,
                rounds: 100,
                repetitions: 1,
            };
            let r = fingerprint_demo(&p, seed).unwrap();
            r.aggregates["max_abs_inner_product"].as_f64().unwrap() <= 0.5
        })
        .count();
    assert!(good as f64 >= 0.9 * seeds as f64, "{good}/{seeds}");
}

#[test]
fn fingerprint_referee_never_rejects_equal_inputs() {
    let p = FingerprintParams {
        k_strings: 64,
        dim_compressed: 32,
        rounds: 20_000,
        repetitions: 4,
    };
    let r = fingerprint_demo(&p, 11).unwrap();
    assert_eq!(r.aggregates["equality_error_rate"].as_f64().unwrap(), 0.0);
    assert!(!r.any_failed(), "{}", r.to_json(false));
}

#[test]
fn two_norm_contraction_at_sixteen_four() {
    let p = TwoNormParams {
        d: 16,
        e: 4,
        trials: 4000,
        family: StateFamily::OrthogonalPure,
        r: 1,
    };
    let r = two_norm_experiment(&p, None, 5).unwrap();
    let factor = r.bounds["avg_contraction_factor"].as_f64().unwrap();
    assert!((factor - 16.0 * 15.0 / (4.0 * 255.0)).abs() < 1e-15);
    assert_eq!(r.verdict("avg-contraction"), Some(Verdict::Pass));
    assert_eq!(r.verdict("origin-ruled-out"), Some(Verdict::Pass));
    // Pure pairs cannot gain 2-norm distance under a channel.
    assert!(r.aggregates["max_ratio2sq"].as_f64().unwrap() <= 1.0 + 1e-9);
}

#[test]
fn two_norm_ratio_reported_for_mixed_pairs() {
    let p = TwoNormParams {
        d: 8,
        e: 2,
        trials: 500,
        family: StateFamily::RankROrthogonalProjectors,
        r: 4,
    };
    let r = two_norm_experiment(&p, None, 6).unwrap();
    assert_eq!(r.verdict("contractivity"), Some(Verdict::Pass));
    assert!(r.aggregates["max_ratio2sq"].as_f64().unwrap().is_finite());
}

#[test]
fn jl_failure_fraction_decays() {
    let p = JlParams {
        n_points: 32,
        d: 1024,
        target_dims: vec![8, 16, 32, 64],
        epsilon: 0.5,
        trials: 10,
    };
    let r = jl_baseline(&p, 8).unwrap();
    assert!(!r.any_failed(), "{}", r.to_json(false));
    let f: Vec<f64> = r.aggregates["sweep"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["failure_fraction"].as_f64().unwrap())
        .collect();
    assert!(f[0] > f[1] && f[1] >= f[3]);
}

#[test]
fn bound_columns_recompute_exactly() {
    for d in [4, 8, 10] {
        let pairs = standard_pairs(d, &mut RngStream::from_seed(d as u64)).unwrap();
        let r = lower_bound_table(d, 0.1, 0.25, &pairs, 0).unwrap();
        for row in &r.trials {
            let again = recompute_row(d, 0.1, 0.25, row).unwrap();
            assert_eq!(again, row["trace_norm_bound"].as_f64().unwrap());
            let n2 = 0.75 * 0.81 * d as f64;
            assert_eq!(row["two_norm_bound"].as_f64().unwrap(), n2);
        }
    }
}

#[test]
fn embed_report_replays_byte_for_byte() {
    let p = EmbedParams {
        d: 32,
        r: 2,
        epsilon: 0.5,
        delta: 0.0,
        e: None,
        trials: 40,
        family: StateFamily::RandomRankRPair,
    };
    let a = embed_experiment(&p, None, 99).unwrap().to_json(true);
    let b = embed_experiment(&p, None, 99).unwrap().to_json(true);
    let c = embed_experiment(&p, None, 100).unwrap().to_json(true);
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn embed_failure_fraction_is_exact_ratio() {
    let p = EmbedParams {
        d: 16,
        r: 1,
        epsilon: 0.3,
        delta: 0.0,
        e: Some(3),
        trials: 64,
        family: StateFamily::OrthogonalPure,
    };
    let r = embed_experiment(&p, None, 4).unwrap();
    let failures = r.aggregates["failures"].as_u64().unwrap();
    let frac = r.aggregates["failure_fraction"].as_f64().unwrap();
    assert_eq!(frac, failures as f64 / 64.0);
    assert_eq!(r.trials.len(), 64);
    for t in &r.trials {
        assert!(t["ratio1"].as_f64().unwrap() <= 1.0 + 1e-9);
    }
}
