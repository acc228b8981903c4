//! Trace-norm embedding by a random isometry followed by a partial trace.

use serde::Serialize;
use serde_json::json;

use super::families::StateFamily;
use super::report::ExperimentReport;
use crate::channels::{embedding_channel, environment_dim, KrausChannel};
use crate::error::{Error, Result};
use crate::linalg::{
    partial_trace_b, positive_part_projector, schatten_norm, support_projector, ComplexMatrix,
    DensityMatrix, HermitianOperator, SchattenP, ZERO_EIG_TOL,
};
use crate::parallel::map_trials;
use crate::sampling::{haar_isometry, Isometry, RngStream};
use crate::verifiers::Verdict;

/// Constant in the failure bound `d·exp(-Kεd)`: `(1 - ln 2)/(2 ln 2)`.
pub const FAILURE_CONSTANT_K: f64 = (1.0 - std::f64::consts::LN_2) / (2.0 * std::f64::consts::LN_2);

/// Slack on "a witness never beats the optimal measurement".
pub const WITNESS_SLACK: f64 = 1e-9;

/// Slack on trace-norm contractivity.
pub const CONTRACTIVITY_SLACK: f64 = 1e-9;

/// `d·exp(-Kεd)`.
pub fn failure_bound(d: usize, epsilon: f64) -> f64 {
    d as f64 * (-FAILURE_CONSTANT_K * epsilon * d as f64).exp()
}

/// `2√(rd/ε)`, the smallest target dimension the failure bound covers.
pub fn min_target_dim(d: usize, r: usize, epsilon: f64) -> f64 {
    2.0 * (r as f64 * d as f64 / epsilon).sqrt()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct WitnessOutcome {
    /// `tr[D_V E_V(ρ-σ)]`.
    pub value: f64,
    /// `½‖E_V(ρ-σ)‖₁`, the best any measurement can do.
    pub optimal: f64,
    /// Number of positive eigenvalues of `ρ-σ`.
    pub s: usize,
}

/// The measurement from the embedding proof: `P_V` projects onto the image
/// under `V` of the positive eigenvectors of `ρ-σ` (equivalently the positive
/// eigenvectors of `V(ρ-σ)V†`), `D_V` onto the support of `tr_B P_V`; returns
/// `tr[D_V E_V(ρ-σ)]`. A value above `½‖E_V(ρ-σ)‖₁ + 1e-9` is reported as a
/// numerical failure.
pub fn witness_measurement_check(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    v: &Isometry,
    e: usize,
) -> Result<WitnessOutcome> {
    let d = rho.dim();
    let delta = rho.difference(sigma)?;
    let ch = embedding_channel(v, d, e)?;
    let s = positive_rank(&delta)?;
    witness_with(&delta, &positive_part_projector(&delta)?, s, v, &ch, e)
}

fn positive_rank(delta: &HermitianOperator) -> Result<usize> {
    Ok(delta
        .eig()?
        .eigenvalues
        .iter()
        .filter(|&&l| l > ZERO_EIG_TOL)
        .count())
}

fn witness_with(
    delta: &HermitianOperator,
    positive: &ComplexMatrix,
    s: usize,
    v: &Isometry,
    ch: &KrausChannel,
    e: usize,
) -> Result<WitnessOutcome> {
    let env = environment_dim(delta.dim(), e);
    let vm = v.matrix();
    let p_v = &(vm * positive) * &vm.adjoint();
    let reduced = HermitianOperator::hermitian_part(&partial_trace_b(&p_v, e, env)?);
    let d_v = support_projector(&reduced)?;
    let out = ch.apply(delta)?;
    let value = d_v.trace_of_product(out.matrix()).re;
    let optimal = 0.5 * schatten_norm(&out, SchattenP::One)?;
    if value > optimal + WITNESS_SLACK {
        return Err(Error::numerical(
            "witness exceeds optimal measurement",
            value - optimal,
        ));
    }
    Ok(WitnessOutcome { value, optimal, s })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EmbedTrialRecord {
    pub trial: u64,
    /// `‖E_V(Δ)‖₁/‖Δ‖₁`.
    pub ratio1: f64,
    /// `‖E_V(Δ)‖₂²/‖Δ‖₂²`.
    pub ratio2sq: f64,
    pub witness_value: f64,
    /// Witness reaches `(1-ε)‖Δ‖₁/2`.
    pub witness_attains: bool,
    pub s: usize,
    /// `ratio1 >= 1 - ε`.
    pub success: bool,
}

/// One trial with a fresh Haar isometry `V: C^d -> C^e ⊗ C^⌈d/e⌉`.
pub fn trace_embed_trial(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    e: usize,
    epsilon: f64,
    rng: &mut RngStream,
) -> Result<EmbedTrialRecord> {
    let d = rho.dim();
    if e == 0 || e > d {
        return Err(Error::param(format!(
            "embedding needs 1 <= e <= d, got e={e}, d={d}"
        )));
    }
    let delta = rho.difference(sigma)?;
    let prep = Prepared::new(&delta)?;
    prep.trial(0, e, epsilon, rng)
}

/// Per-pair quantities shared by all trials.
struct Prepared<'a> {
    delta: &'a HermitianOperator,
    positive: ComplexMatrix,
    s: usize,
    norm1: f64,
    norm2sq: f64,
}

impl<'a> Prepared<'a> {
    fn new(delta: &'a HermitianOperator) -> Result<Self> {
        let norm1 = schatten_norm(delta, SchattenP::One)?;
        if norm1 <= ZERO_EIG_TOL {
            return Err(Error::param("states must differ"));
        }
        Ok(Self {
            delta,
            positive: positive_part_projector(delta)?,
            s: positive_rank(delta)?,
            norm1,
            norm2sq: delta.trace_sq(),
        })
    }

    fn trial(
        &self,
        index: u64,
        e: usize,
        epsilon: f64,
        rng: &mut RngStream,
    ) -> Result<EmbedTrialRecord> {
        let d = self.delta.dim();
        let v = haar_isometry(d, e * environment_dim(d, e), rng)?;
        let ch = embedding_channel(&v, d, e)?;
        let out = ch.apply(self.delta)?;
        let ratio1 = schatten_norm(&out, SchattenP::One)? / self.norm1;
        let ratio2sq = out.trace_sq() / self.norm2sq;
        let w = witness_with(self.delta, &self.positive, self.s, &v, &ch, e)?;
        Ok(EmbedTrialRecord {
            trial: index,
            ratio1,
            ratio2sq,
            witness_value: w.value,
            witness_attains: w.value >= (1.0 - epsilon) * self.norm1 / 2.0,
            s: w.s,
            success: ratio1 >= 1.0 - epsilon,
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EmbedParams {
    pub d: usize,
    pub r: usize,
    pub epsilon: f64,
    pub delta: f64,
    /// `None` derives `⌈2√(rd/ε)⌉`.
    pub e: Option<usize>,
    pub trials: usize,
    pub family: StateFamily,
}

impl EmbedParams {
    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::param("d must be >= 2"));
        }
        if self.r == 0 || self.r > self.d {
            return Err(Error::param(format!("rank must lie in 1..={}", self.d)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::param(format!(
                "epsilon must lie in (0,1), got {}",
                self.epsilon
            )));
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(Error::param(format!(
                "delta must lie in [0,1], got {}",
                self.delta
            )));
        }
        if self.trials == 0 {
            return Err(Error::param("trials must be >= 1"));
        }
        if let Some(e) = self.e {
            if e == 0 || e > self.d {
                return Err(Error::param(format!(
                    "target dimension must lie in 1..={}",
                    self.d
                )));
            }
        }
        Ok(())
    }

    /// The target dimension to use and whether it satisfies
    /// `2√(rd/ε) <= e <= d`.
    pub fn resolve_e(&self) -> (usize, bool) {
        let min = min_target_dim(self.d, self.r, self.epsilon);
        let e = self.e.unwrap_or_else(|| (min.ceil() as usize).min(self.d));
        (e, min <= e as f64 && e <= self.d)
    }
}

/// Runs the embedding trials for the pair drawn from `params.family` (or the
/// given explicit pair) and compares the failure fraction with `d·exp(-Kεd)`.
pub fn embed_experiment(
    params: &EmbedParams,
    explicit: Option<(DensityMatrix, DensityMatrix)>,
    seed: u64,
) -> Result<ExperimentReport> {
    params.validate()?;
    let rng = RngStream::from_seed(seed);
    let family_name = if explicit.is_some() {
        StateFamily::Explicit.as_str()
    } else {
        params.family.as_str()
    };
    let (rho, sigma) = match explicit {
        Some(pair) => pair,
        None => params
            .family
            .build(params.d, params.r, &mut rng.substream(0))?,
    };
    if rho.dim() != params.d {
        return Err(Error::dims(format!(
            "states are {0}x{0}, expected d={1}",
            rho.dim(),
            params.d
        )));
    }
    let (e, in_scope) = params.resolve_e();
    let delta = rho.difference(&sigma)?;
    let prep = Prepared::new(&delta)?;
    let root = rng.substream(1);
    let records = map_trials(params.trials, &root, |i, rng| {
        prep.trial(i as u64, e, params.epsilon, rng)
    });
    let records = records.into_iter().collect::<Result<Vec<_>>>()?;

    let n = records.len() as f64;
    let failures = records.iter().filter(|t| !t.success).count();
    let witness_misses = records.iter().filter(|t| !t.witness_attains).count();
    let success_without_witness = records
        .iter()
        .filter(|t| t.success && !t.witness_attains)
        .count();
    let max_ratio1 = records
        .iter()
        .map(|t| t.ratio1)
        .fold(f64::NEG_INFINITY, f64::max);
    let min_ratio1 = records
        .iter()
        .map(|t| t.ratio1)
        .fold(f64::INFINITY, f64::min);
    let mean_ratio1 = records.iter().map(|t| t.ratio1).sum::<f64>() / n;
    let mean_ratio2sq = records.iter().map(|t| t.ratio2sq).sum::<f64>() / n;
    let mean_witness = records.iter().map(|t| t.witness_value).sum::<f64>() / n;
    let max_s = records.iter().map(|t| t.s).max().unwrap_or(0);

    let bound = failure_bound(params.d, params.epsilon);
    let bound_sigma = {
        let b = bound.clamp(0.0, 1.0);
        (b * (1.0 - b) / n).sqrt()
    };
    let failure_fraction = failures as f64 / n;
    let witness_failure_fraction = witness_misses as f64 / n;
    let threshold = bound + 3.0 * bound_sigma;

    let mut report = ExperimentReport::new("embed", seed);
    report.params = json!({
        "d": params.d,
        "r": params.r,
        "epsilon": params.epsilon,
        "delta": params.delta,
        "e": e,
        "e_auto": params.e.is_none(),
        "environment_dim": environment_dim(params.d, e),
        "trials": params.trials,
        "state_family": family_name,
    });
    report.bounds = json!({
        "K": FAILURE_CONSTANT_K,
        "failure_bound": bound,
        "failure_bound_sigma": bound_sigma,
        "min_target_dim": min_target_dim(params.d, params.r, params.epsilon),
        "in_theorem_scope": in_scope,
    });
    report.aggregates = json!({
        "failures": failures,
        "failure_fraction": failure_fraction,
        "witness_misses": witness_misses,
        "witness_failure_fraction": witness_failure_fraction,
        "successes_without_witness": success_without_witness,
        "mean_ratio1": mean_ratio1,
        "min_ratio1": min_ratio1,
        "max_ratio1": max_ratio1,
        "mean_ratio2sq": mean_ratio2sq,
        "mean_witness_value": mean_witness,
        "witness_target": (1.0 - params.epsilon) * prep.norm1 / 2.0,
        "trace_norm": prep.norm1,
        "max_s": max_s,
    });
    report.trials = records
        .iter()
        .map(|t| serde_json::to_value(t).expect("record serializes"))
        .collect();

    let scoped = |ok: bool| {
        if in_scope {
            Verdict::from_bool(ok)
        } else {
            Verdict::OutsideTheoremScope
        }
    };
    report.push_verdict("failure-bound", scoped(failure_fraction <= threshold));
    report.push_verdict(
        "witness-bound",
        scoped(witness_failure_fraction <= threshold),
    );
    report.push_verdict(
        "witness-on-success",
        Verdict::from_bool(success_without_witness == 0),
    );
    report.push_verdict(
        "contractivity",
        Verdict::from_bool(max_ratio1 <= 1.0 + CONTRACTIVITY_SLACK),
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::PureState;

    fn pure_pair(d: usize) -> (DensityMatrix, DensityMatrix) {
        (
            PureState::basis(d, 0).unwrap().to_density(),
            PureState::basis(d, 1).unwrap().to_density(),
        )
    }

    #[test]
    fn constant_and_bound() {
        assert!((FAILURE_CONSTANT_K - 0.221_347_5).abs() < 1e-6);
        let b = failure_bound(64, 0.5);
        assert!((b - 64.0 * (-FAILURE_CONSTANT_K * 32.0).exp()).abs() < 1e-15);
        assert!((b - 0.0537).abs() < 1e-3);
        assert!((min_target_dim(64, 1, 0.5) - 2.0 * 128f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn full_dimension_is_exact() {
        let mut rng = RngStream::from_seed(60);
        let (rho, sigma) = pure_pair(5);
        let t = trace_embed_trial(&rho, &sigma, 5, 0.1, &mut rng).unwrap();
        assert!((t.ratio1 - 1.0).abs() < 1e-9);
        assert!((t.witness_value - 1.0).abs() < 1e-9);
        assert!(t.success && t.witness_attains);
    }

    #[test]
    fn trial_rejects_large_e() {
        let mut rng = RngStream::from_seed(61);
        let (rho, sigma) = pure_pair(4);
        assert!(trace_embed_trial(&rho, &sigma, 5, 0.1, &mut rng).is_err());
    }

    #[test]
    fn witness_never_beats_optimal() {
        let mut rng = RngStream::from_seed(62);
        let (rho, sigma) = StateFamily::RandomRankRPair.build(12, 2, &mut rng).unwrap();
        for e in [3, 4, 6] {
            let v = haar_isometry(12, e * environment_dim(12, e), &mut rng).unwrap();
            let w = witness_measurement_check(&rho, &sigma, &v, e).unwrap();
            assert!(w.value <= w.optimal + WITNESS_SLACK);
            assert!(w.s <= 2);
        }
    }

    #[test]
    fn scope_resolution() {
        let p = EmbedParams {
            d: 8,
            r: 8,
            epsilon: 0.5,
            delta: 0.0,
            e: None,
            trials: 3,
            family: StateFamily::RandomRankRPair,
        };
        assert_eq!(p.resolve_e(), (8, false));
        let r = embed_experiment(&p, None, 1).unwrap();
        assert_eq!(
            r.verdict("failure-bound"),
            Some(Verdict::OutsideTheoremScope)
        );
        assert!(!r.any_failed());
        let p64 = EmbedParams {
            d: 64,
            r: 1,
            e: None,
            ..p
        };
        assert_eq!(p64.resolve_e(), (23, true));
    }

    #[test]
    fn report_replays() {
        let p = EmbedParams {
            d: 16,
            r: 1,
            epsilon: 0.5,
            delta: 0.0,
            e: Some(12),
            trials: 8,
            family: StateFamily::OrthogonalPure,
        };
        let a = embed_experiment(&p, None, 9).unwrap().to_json(true);
        let b = embed_experiment(&p, None, 9).unwrap().to_json(true);
        assert_eq!(a, b);
    }
}
