//! Target-dimension lower bounds for trace-norm and 2-norm embeddings,
//! evaluated on concrete state pairs.

use serde_json::{json, Value};

use super::families::{orthogonal_projector_pair, StateFamily};
use super::report::ExperimentReport;
use super::two_norm::two_norm_lower_bound;
use crate::error::{Error, Result};
use crate::linalg::{schatten_norm, DensityMatrix, SchattenP, ZERO_EIG_TOL};
use crate::sampling::RngStream;
use crate::verifiers::Verdict;

/// Allowed gap between a reported ratio and its closed form.
pub const RATIO_TOL: f64 = 1e-9;

/// A labelled pair of states for the bound table.
#[derive(Clone, Debug)]
pub struct BoundPair {
    pub family: StateFamily,
    pub r: usize,
    pub rho: DensityMatrix,
    pub sigma: DensityMatrix,
}

impl BoundPair {
    /// `√(2r)` for orthogonal projector pairs, where `‖Δ‖₁/‖Δ‖₂` is known.
    pub fn expected_ratio(&self) -> Option<f64> {
        match self.family {
            StateFamily::OrthogonalPure => Some(2f64.sqrt()),
            StateFamily::RankROrthogonalProjectors => Some((2.0 * self.r as f64).sqrt()),
            _ => None,
        }
    }
}

/// `(1-δ)(1-ε)√d · ‖Δ‖₁/‖Δ‖₂`.
pub fn trace_norm_lower_bound(d: usize, epsilon: f64, delta: f64, ratio: f64) -> f64 {
    (1.0 - delta) * (1.0 - epsilon) * (d as f64).sqrt() * ratio
}

/// The pairs used when no family is requested: the orthogonal pure pair,
/// orthogonal projector pairs for every `r <= d/2`, and one random pair of
/// rank `min(2, d)`.
pub fn standard_pairs(d: usize, rng: &mut RngStream) -> Result<Vec<BoundPair>> {
    let mut pairs = vec![family_pair(StateFamily::OrthogonalPure, d, 1, rng)?];
    for r in 1..=d / 2 {
        pairs.push(family_pair(
            StateFamily::RankROrthogonalProjectors,
            d,
            r,
            rng,
        )?);
    }
    pairs.push(family_pair(StateFamily::RandomRankRPair, d, d.min(2), rng)?);
    Ok(pairs)
}

pub fn family_pair(
    family: StateFamily,
    d: usize,
    r: usize,
    rng: &mut RngStream,
) -> Result<BoundPair> {
    let (rho, sigma) = match family {
        StateFamily::RankROrthogonalProjectors => orthogonal_projector_pair(d, r)?,
        f => f.build(d, r, rng)?,
    };
    Ok(BoundPair {
        family,
        r,
        rho,
        sigma,
    })
}

/// One row per pair. The verdict checks the projector ratios against `√(2r)`.
pub fn lower_bound_table(
    d: usize,
    epsilon: f64,
    delta: f64,
    pairs: &[BoundPair],
    seed: u64,
) -> Result<ExperimentReport> {
    if !(0.0..1.0).contains(&epsilon) || !(0.0..=1.0).contains(&delta) {
        return Err(Error::param(format!(
            "need epsilon in [0,1) and delta in [0,1], got {epsilon}, {delta}"
        )));
    }
    let two_norm_bound = two_norm_lower_bound(d, epsilon, delta);
    let mut rows = Vec::with_capacity(pairs.len());
    let mut worst_gap: f64 = 0.0;
    for (i, p) in pairs.iter().enumerate() {
        if p.rho.dim() != d || p.sigma.dim() != d {
            return Err(Error::dims(format!("pair {i} is not {d}-dimensional")));
        }
        let diff = p.rho.difference(&p.sigma)?;
        let norm1 = schatten_norm(&diff, SchattenP::One)?;
        let norm2 = schatten_norm(&diff, SchattenP::Two)?;
        if norm2 <= ZERO_EIG_TOL {
            return Err(Error::param(format!("pair {i} has identical states")));
        }
        let ratio = norm1 / norm2;
        let expected = p.expected_ratio();
        if let Some(x) = expected {
            worst_gap = worst_gap.max((ratio - x).abs());
        }
        rows.push(json!({
            "pair": i,
            "family": p.family.as_str(),
            "r": p.r,
            "norm1": norm1,
            "norm2": norm2,
            "ratio": ratio,
            "expected_ratio": expected,
            "trace_norm_bound": trace_norm_lower_bound(d, epsilon, delta, ratio),
            "two_norm_bound": two_norm_bound,
        }));
    }

    let mut report = ExperimentReport::new("bounds", seed);
    report.params = json!({"d": d, "epsilon": epsilon, "delta": delta, "pairs": pairs.len()});
    report.bounds = json!({
        "two_norm_bound": two_norm_bound,
        "pure_trace_norm_bound": (1.0 - delta) * (1.0 - epsilon) * (2.0 * d as f64).sqrt(),
        "half_rank_trace_norm_bound": (1.0 - delta) * (1.0 - epsilon) * d as f64,
    });
    report.aggregates = json!({
        "max_trace_norm_bound": rows
            .iter()
            .filter_map(|r| r["trace_norm_bound"].as_f64())
            .fold(f64::NEG_INFINITY, f64::max),
        "max_ratio_gap": worst_gap,
    });
    report.trials = rows;
    report.push_verdict(
        "projector-ratio",
        Verdict::from_bool(worst_gap <= RATIO_TOL),
    );
    Ok(report)
}

/// The `trace_norm_bound` column of a table row, recomputed from its norms.
pub fn recompute_row(d: usize, epsilon: f64, delta: f64, row: &Value) -> Option<f64> {
    let n1 = row["norm1"].as_f64()?;
    let n2 = row["norm2"].as_f64()?;
    Some(trace_norm_lower_bound(d, epsilon, delta, n1 / n2))
}
