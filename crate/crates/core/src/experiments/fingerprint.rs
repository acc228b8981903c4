//! Quantum fingerprinting with swap tests: `k` classical strings are mapped
//! to orthonormal basis vectors, compressed to `dim_compressed` dimensions,
//! renormalized, and compared by a referee running swap tests.

use serde_json::json;

use super::report::ExperimentReport;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::parallel::map_trials;
use crate::sampling::{haar_isometry, RngStream};
use crate::verifiers::{frequency, Verdict, BOUND_FLOAT_SLACK, SIGMA_MARGIN};
use crate::C64;

/// Sigmas allowed between the simulated and analytic inequality error.
pub const INEQUALITY_SIGMAS: f64 = 4.0;

#[derive(Clone, Copy, Debug)]
pub struct FingerprintParams {
    pub k_strings: usize,
    pub dim_compressed: usize,
    pub rounds: usize,
    /// Swap tests per round; the referee declares "equal" only if all accept.
    pub repetitions: usize,
}

/// Column `a` is the fingerprint of string `a`.
///
/// With `dim_compressed >= k` the basis vectors are mapped by a Haar isometry
/// (the identity when the dimensions agree). Otherwise basis vector `a` is
/// sent to row `a` of a Haar `k x dim_compressed` isometry, i.e. projected
/// onto a random `dim_compressed`-dimensional subspace, and renormalized.
pub fn fingerprints(k: usize, dc: usize, rng: &mut RngStream) -> Result<ComplexMatrix> {
    if dc == k {
        return Ok(ComplexMatrix::identity(k));
    }
    if dc > k {
        return Ok(haar_isometry(k, dc, rng)?.matrix().clone());
    }
    let w = haar_isometry(dc, k, rng)?.matrix().adjoint();
    let mut cols = Vec::with_capacity(k);
    for a in 0..k {
        let v = w.column(a);
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::numerical("fingerprint of zero norm", 0.0));
        }
        cols.push(v.into_iter().map(|z| z / norm).collect::<Vec<C64>>());
    }
    ComplexMatrix::from_columns(dc, &cols)
}

/// `½ + ½|⟨φ|ψ⟩|²`.
pub fn swap_test_acceptance(phi: &[C64], psi: &[C64]) -> f64 {
    let ip: C64 = phi.iter().zip(psi).map(|(a, b)| a.conj() * b).sum();
    (0.5 + 0.5 * ip.norm_sqr()).min(1.0)
}

pub fn fingerprint_demo(params: &FingerprintParams, seed: u64) -> Result<ExperimentReport> {
    let FingerprintParams {
        k_strings: k,
        dim_compressed: dc,
        rounds,
        repetitions,
    } = *params;
    if k < 2 {
        return Err(Error::param("need at least 2 strings"));
    }
    if dc < 2 {
        return Err(Error::param(format!(
            "compressed dimension must be >= 2, got {dc}"
        )));
    }
    if rounds == 0 || repetitions == 0 {
        return Err(Error::param("rounds and repetitions must be >= 1"));
    }
    let root = RngStream::from_seed(seed);
    let phi = fingerprints(k, dc, &mut root.substream(0))?;
    let cols: Vec<Vec<C64>> = (0..k).map(|a| phi.column(a)).collect();

    // Acceptance probabilities for distinct pairs; identical inputs accept with certainty.
    let mut accept = vec![1.0; k * k];
    let mut max_ip: f64 = 0.0;
    let mut sum_ip = 0.0;
    let mut false_equal_analytic = 0.0;
    for a in 0..k {
        for b in 0..k {
            if a != b {
                let p = swap_test_acceptance(&cols[a], &cols[b]);
                accept[a * k + b] = p;
                let ip = (2.0 * p - 1.0).max(0.0).sqrt();
                max_ip = max_ip.max(ip);
                sum_ip += ip;
                false_equal_analytic += p.powi(repetitions as i32);
            }
        }
    }
    let ordered_pairs = (k * (k - 1)) as f64;
    false_equal_analytic /= ordered_pairs;

    let rows = map_trials(rounds, &root.substream(1), |i, rng| {
        let a = rng.below(k as u64) as usize;
        let equal = rng.bernoulli(0.5);
        let b = if equal {
            a
        } else {
            let x = rng.below(k as u64 - 1) as usize;
            if x >= a {
                x + 1
            } else {
                x
            }
        };
        let p = accept[a * k + b];
        let accepted = (0..repetitions).filter(|_| rng.bernoulli(p)).count();
        let declared_equal = accepted == repetitions;
        (i, a, b, equal, accepted, declared_equal)
    });

    let equal_rounds = rows.iter().filter(|r| r.3).count();
    let unequal_rounds = rounds - equal_rounds;
    let equality_errors = rows.iter().filter(|r| r.3 && !r.5).count();
    let inequality_errors = rows.iter().filter(|r| !r.3 && r.5).count();
    let ineq = frequency(inequality_errors as u64, unequal_rounds as u64);
    let analytic_sigma = if unequal_rounds == 0 {
        0.0
    } else {
        (false_equal_analytic * (1.0 - false_equal_analytic) / unequal_rounds as f64).sqrt()
    };
    let ineq_ok = unequal_rounds == 0
        || (ineq.mean - false_equal_analytic).abs()
            <= INEQUALITY_SIGMAS * analytic_sigma + BOUND_FLOAT_SLACK;

    let mut report = ExperimentReport::new("fingerprint", seed);
    report.params = json!({
        "k_strings": k,
        "dim_compressed": dc,
        "rounds": rounds,
        "repetitions": repetitions,
    });
    report.bounds = json!({
        "inequality_error_analytic": false_equal_analytic,
        "equality_error_analytic": 0.0,
        "sigma_margin": SIGMA_MARGIN,
    });
    report.aggregates = json!({
        "max_abs_inner_product": max_ip,
        "mean_abs_inner_product": sum_ip / ordered_pairs,
        "equal_rounds": equal_rounds,
        "unequal_rounds": unequal_rounds,
        "equality_error_rate": if equal_rounds == 0 { 0.0 } else { equality_errors as f64 / equal_rounds as f64 },
        "inequality_error_rate": ineq.mean,
        "inequality_std_error": ineq.std_error,
    });
    report.trials = rows
        .iter()
        .map(|&(i, a, b, equal, accepted, declared)| {
            json!({
                "round": i,
                "a": a,
                "b": b,
                "equal": equal,
                "accept_probability": accept[a * k + b],
                "accepted": accepted,
                "declared_equal": declared,
                "correct": declared == equal,
            })
        })
        .collect();
    report.push_verdict(
        "equality-never-rejected",
        Verdict::from_bool(equality_errors == 0),
    );
    report.push_verdict("inequality-error", Verdict::from_bool(ineq_ok));
    Ok(report)
}
