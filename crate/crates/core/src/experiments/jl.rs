//! Classical Johnson–Lindenstrauss baseline: Gaussian projections of random
//! point clouds in `R^d`.

use serde_json::json;

use super::report::ExperimentReport;
use crate::error::{Error, Result};
use crate::parallel::map_trials;
use crate::sampling::RngStream;
use crate::verifiers::{frequency, MonteCarloEstimate, Verdict};

/// Sigmas allowed between consecutive failure fractions of an `e` sweep.
pub const MONOTONE_SIGMAS: f64 = 2.0;

#[derive(Clone, Debug)]
pub struct JlParams {
    pub n_points: usize,
    pub d: usize,
    pub target_dims: Vec<usize>,
    pub epsilon: f64,
    pub trials: usize,
}

impl JlParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_points < 2 {
            return Err(Error::param("need at least 2 points"));
        }
        if self.trials == 0 {
            return Err(Error::param("trials must be >= 1"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::param(format!(
                "epsilon must lie in (0,1), got {}",
                self.epsilon
            )));
        }
        if self.target_dims.is_empty() {
            return Err(Error::param("need at least one target dimension"));
        }
        if let Some(&e) = self.target_dims.iter().find(|&&e| e == 0 || e > self.d) {
            return Err(Error::param(format!(
                "target dimension {e} outside 1..={}",
                self.d
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
struct Distortion {
    failures: usize,
    min: f64,
    max: f64,
    valid: bool,
}

fn gaussian_points(n: usize, d: usize, rng: &mut RngStream) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..d).map(|_| rng.gaussian()).collect())
        .collect()
}

/// Applies `G/√e` with `G` an `e x d` standard Gaussian matrix. At `e = d`
/// the map is the identity.
fn project(points: &[Vec<f64>], e: usize, rng: &mut RngStream) -> Vec<Vec<f64>> {
    let d = points[0].len();
    if e == d {
        return points.to_vec();
    }
    let scale = 1.0 / (e as f64).sqrt();
    let g: Vec<f64> = (0..e * d).map(|_| rng.gaussian() * scale).collect();
    points
        .iter()
        .map(|x| {
            g.chunks_exact(d)
                .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
                .collect()
        })
        .collect()
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn distortion(before: &[Vec<f64>], after: &[Vec<f64>], epsilon: f64) -> Distortion {
    let mut out = Distortion {
        failures: 0,
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
        valid: true,
    };
    let n = before.len();
    for i in 0..n {
        for j in i + 1..n {
            let orig = distance(&before[i], &before[j]);
            let proj = distance(&after[i], &after[j]);
            let back = distance(&after[j], &after[i]);
            out.valid &= orig > 0.0 && proj >= 0.0 && proj == back && proj.is_finite();
            let ratio = proj / orig;
            if (ratio - 1.0).abs() > epsilon {
                out.failures += 1;
            }
            out.min = out.min.min(ratio);
            out.max = out.max.max(ratio);
        }
    }
    out
}

/// Each trial draws a fresh point cloud and, for every target dimension, a
/// fresh projection. A pair fails when its distance ratio leaves `[1-ε, 1+ε]`.
pub fn jl_baseline(params: &JlParams, seed: u64) -> Result<ExperimentReport> {
    params.validate()?;
    let JlParams {
        n_points,
        d,
        epsilon,
        trials,
        ..
    } = *params;
    let dims = &params.target_dims;
    let root = RngStream::from_seed(seed);
    let per_trial = map_trials(trials, &root, |_, rng| {
        let points = gaussian_points(n_points, d, rng);
        dims.iter()
            .map(|&e| {
                let projected = project(&points, e, rng);
                distortion(&points, &projected, epsilon)
            })
            .collect::<Vec<_>>()
    });

    let pairs = n_points * (n_points - 1) / 2;
    let mut rows = Vec::new();
    let mut sweep = Vec::new();
    let mut valid = true;
    for (k, &e) in dims.iter().enumerate() {
        let mut failures = 0;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (t, trial) in per_trial.iter().enumerate() {
            let x = trial[k];
            failures += x.failures;
            lo = lo.min(x.min);
            hi = hi.max(x.max);
            valid &= x.valid;
            rows.push(json!({
                "e": e,
                "trial": t,
                "failures": x.failures,
                "pairs": pairs,
                "failure_fraction": x.failures as f64 / pairs as f64,
                "min_ratio": x.min,
                "max_ratio": x.max,
            }));
        }
        let est = frequency(failures as u64, (pairs * trials) as u64);
        sweep.push((e, est, lo, hi));
    }

    let monotone = monotone_within(
        &sweep.iter().map(|s| s.1).collect::<Vec<_>>(),
        MONOTONE_SIGMAS,
    );
    let mut report = ExperimentReport::new("jl", seed);
    report.params = json!({
        "n_points": n_points,
        "d": d,
        "target_dims": dims,
        "epsilon": epsilon,
        "trials": trials,
    });
    report.bounds = json!({"distortion_window": [1.0 - epsilon, 1.0 + epsilon]});
    report.aggregates = json!({
        "sweep": sweep
            .iter()
            .map(|(e, est, lo, hi)| json!({
                "e": e,
                "failure_fraction": est.mean,
                "std_error": est.std_error,
                "min_ratio": lo,
                "max_ratio": hi,
            }))
            .collect::<Vec<_>>(),
    });
    report.trials = rows;
    report.push_verdict("distances-valid", Verdict::from_bool(valid));
    report.push_verdict("monotone-decay", Verdict::from_bool(monotone));
    Ok(report)
}

/// True when no estimate exceeds its predecessor by more than `k` combined sigmas.
pub fn monotone_within(est: &[MonteCarloEstimate], k: f64) -> bool {
    est.windows(2).all(|w| {
        let slack = k * (w[0].std_error.powi(2) + w[1].std_error.powi(2)).sqrt();
        w[1].mean <= w[0].mean + slack
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_no_distortion() {
        let p = JlParams {
            n_points: 8,
            d: 16,
            target_dims: vec![16],
            epsilon: 0.1,
            trials: 2,
        };
        let r = jl_baseline(&p, 5).unwrap();
        let s = &r.aggregates["sweep"][0];
        assert_eq!(s["failure_fraction"].as_f64().unwrap(), 0.0);
        assert!((s["min_ratio"].as_f64().unwrap() - 1.0).abs() < 1e-15);
        assert!((s["max_ratio"].as_f64().unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn failures_decay_with_target_dimension() {
        let p = JlParams {
            n_points: 16,
            d: 256,
            target_dims: vec![4, 16, 64],
            epsilon: 0.5,
            trials: 10,
        };
        let r = jl_baseline(&p, 7).unwrap();
        assert!(!r.any_failed(), "{}", r.to_json(false));
        let f: Vec<f64> = r.aggregates["sweep"]
            .as_array()
            .unwrap()
            .iter()
            .map(|s| s["failure_fraction"].as_f64().unwrap())
            .collect();
        assert!(f[0] > f[2]);
    }

    #[test]
    fn validation() {
        let mut p = JlParams {
            n_points: 4,
            d: 8,
            target_dims: vec![9],
            epsilon: 0.5,
            trials: 1,
        };
        assert!(jl_baseline(&p, 1).is_err());
        p.target_dims = vec![4];
        p.epsilon = 1.5;
        assert!(jl_baseline(&p, 1).is_err());
    }

    #[test]
    fn monotone_check() {
        let e = |m: f64| MonteCarloEstimate {
            mean: m,
            std_error: 0.01,
            samples: 100,
        };
        assert!(monotone_within(&[e(0.5), e(0.51), e(0.2)], 2.0));
        assert!(!monotone_within(&[e(0.2), e(0.5)], 2.0));
    }
}
