//! Average 2-norm contraction of random embedding channels and the
//! resulting region of ruled-out `(ε, δ)` pairs.

use serde_json::{json, Value};

use super::embed::CONTRACTIVITY_SLACK;
use super::families::StateFamily;
use super::report::ExperimentReport;
use crate::channels::random_embedding_channel;
use crate::error::{Error, Result};
use crate::linalg::{schatten_norm, DensityMatrix, SchattenP, ZERO_EIG_TOL};
use crate::parallel::{map_trials, pairwise_reduce, ScalarStats};
use crate::sampling::{haar_unitary, RngStream};
use crate::verifiers::{avg_contraction_factor, BoundCheck, MonteCarloEstimate, Verdict};

/// Grid of `ε` and `δ` values reported by the experiment.
pub const GRID: [f64; 4] = [0.0, 0.1, 0.25, 0.5];

/// `(1-δ)(1-ε)²d`, the smallest target dimension any 2-norm embedding with
/// these parameters can have.
pub fn two_norm_lower_bound(d: usize, epsilon: f64, delta: f64) -> f64 {
    (1.0 - delta) * (1.0 - epsilon).powi(2) * d as f64
}

#[derive(Clone, Copy, Debug)]
pub struct TwoNormParams {
    pub d: usize,
    pub e: usize,
    pub trials: usize,
    pub family: StateFamily,
    pub r: usize,
}

/// Each trial draws a fresh embedding channel `E_V` and a fresh Haar `U`,
/// and records `‖E_V(UΔU†)‖₂²/‖Δ‖₂²`.
pub fn two_norm_experiment(
    params: &TwoNormParams,
    explicit: Option<(DensityMatrix, DensityMatrix)>,
    seed: u64,
) -> Result<ExperimentReport> {
    let TwoNormParams { d, e, trials, .. } = *params;
    if e == 0 || e > d {
        return Err(Error::param(format!(
            "target dimension must lie in 1..={d}, got {e}"
        )));
    }
    if trials < 2 {
        return Err(Error::param("trials must be >= 2"));
    }
    let rng = RngStream::from_seed(seed);
    let family_name = if explicit.is_some() {
        StateFamily::Explicit.as_str()
    } else {
        params.family.as_str()
    };
    let (rho, sigma) = match explicit {
        Some(pair) => pair,
        None => params.family.build(d, params.r, &mut rng.substream(0))?,
    };
    if rho.dim() != d {
        return Err(Error::dims(format!(
            "states are {0}x{0}, expected d={d}",
            rho.dim()
        )));
    }
    let delta = rho.difference(&sigma)?;
    let norm2sq = delta.trace_sq();
    let norm1 = schatten_norm(&delta, SchattenP::One)?;
    if norm1 <= ZERO_EIG_TOL {
        return Err(Error::param("states must differ"));
    }

    let root = rng.substream(1);
    let rows = map_trials(trials, &root, |_, rng| -> Result<(f64, f64)> {
        let ch = random_embedding_channel(d, e, rng)?;
        let u = haar_unitary(d, rng)?;
        let out = ch.apply(&delta.conjugate_by(&u))?;
        Ok((
            out.trace_sq() / norm2sq,
            schatten_norm(&out, SchattenP::One)? / norm1,
        ))
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let stats = pairwise_reduce(
        rows.iter()
            .map(|&(r2, _)| {
                let mut s = ScalarStats::default();
                s.push(r2);
                s
            })
            .collect(),
        ScalarStats::merge,
    )
    .unwrap_or_default();
    let estimate = MonteCarloEstimate::from(stats);
    let factor = avg_contraction_factor(d, e);
    let check = BoundCheck::at_most(estimate, factor);
    let max_ratio2sq = rows.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
    let max_ratio1 = rows.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);

    let mut grid = Vec::new();
    for &eps in &GRID {
        for &del in &GRID {
            let lb = two_norm_lower_bound(d, eps, del);
            grid.push(json!({
                "epsilon": eps,
                "delta": del,
                "lower_bound": lb,
                "ruled_out": lb > e as f64,
            }));
        }
    }

    let mut report = ExperimentReport::new("two-norm", seed);
    report.params = json!({
        "d": d,
        "e": e,
        "trials": trials,
        "state_family": family_name,
        "r": params.r,
    });
    report.bounds = json!({
        "avg_contraction_factor": factor,
        "ceiling_e_over_d": e as f64 / d as f64,
    });
    report.aggregates = json!({
        "mean_ratio2sq": estimate.mean,
        "std_error": estimate.std_error,
        "max_ratio2sq": max_ratio2sq,
        "max_ratio1": max_ratio1,
        "ruled_out": Value::Array(grid),
    });
    report.trials = rows
        .iter()
        .enumerate()
        .map(|(i, &(r2, r1))| json!({"trial": i, "ratio2sq": r2, "ratio1": r1}))
        .collect();
    report.push_verdict("avg-contraction", check.verdict);
    report.push_verdict(
        "contractivity",
        Verdict::from_bool(max_ratio1 <= 1.0 + CONTRACTIVITY_SLACK),
    );
    if e < d {
        let origin = two_norm_lower_bound(d, 0.0, 0.0) > e as f64;
        report.push_verdict("origin-ruled-out", Verdict::from_bool(origin));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(d: usize, e: usize, trials: usize) -> TwoNormParams {
        TwoNormParams {
            d,
            e,
            trials,
            family: StateFamily::OrthogonalPure,
            r: 1,
        }
    }

    #[test]
    fn full_dimension_ratio_is_one() {
        let r = two_norm_experiment(&params(6, 6, 20), None, 3).unwrap();
        let mean = r.aggregates["mean_ratio2sq"].as_f64().unwrap();
        assert!((mean - 1.0).abs() < 1e-10);
        assert_eq!(r.bounds["avg_contraction_factor"].as_f64().unwrap(), 1.0);
        assert!(!r.any_failed());
    }

    #[test]
    fn origin_ruled_out_below_full_dimension() {
        let r = two_norm_experiment(&params(8, 3, 200), None, 4).unwrap();
        let grid = r.aggregates["ruled_out"].as_array().unwrap();
        assert_eq!(grid[0]["epsilon"], 0.0);
        assert_eq!(grid[0]["ruled_out"], true);
        assert!(!r.any_failed(), "{}", r.to_json(false));
    }

    #[test]
    fn lower_bound_arithmetic() {
        assert_eq!(two_norm_lower_bound(16, 0.0, 0.0), 16.0);
        assert!((two_norm_lower_bound(16, 0.5, 0.5) - 2.0).abs() < 1e-15);
    }
}
