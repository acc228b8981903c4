//! The projector-support inequality and Haar concentration of a projector's
//! overlap with a fixed state.

use serde::Serialize;

use super::{check_samples, frequency, BoundCheck};
use crate::error::{Error, Result};
use crate::linalg::{
    kron, partial_trace_b, support_projector, ComplexMatrix, HermitianOperator, PureState,
};
use crate::parallel::{map_chunks, map_trials, pairwise_reduce};
use crate::sampling::{haar_isometry, haar_pure_state, haar_unitary, random_projector, RngStream};
use crate::C64;

/// Slack allowed on the projector-support inequality.
pub const PROJSUPP_SLACK: f64 = 1e-10;

/// Both sides of `tr[(D⊗I) P⊥|ψ><ψ|P⊥] <= tr[(D⊗I)|ψ><ψ|] · tr[P⊥|ψ><ψ|]`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ProjSuppOutcome {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Evaluates the inequality for a given projector `P` on `C^a ⊗ C^b` and
/// state `|ψ>`; `D` is the support projector of `tr_B P`.
pub fn projsupp_evaluate(
    p: &ComplexMatrix,
    psi: &PureState,
    dim_a: usize,
    dim_b: usize,
) -> Result<ProjSuppOutcome> {
    let n = dim_a * dim_b;
    if p.shape() != (n, n) || psi.dim() != n {
        return Err(Error::dims(format!(
            "projector {}x{} and state of dimension {} do not fit {dim_a}x{dim_b}",
            p.rows(),
            p.cols(),
            psi.dim()
        )));
    }
    let reduced = HermitianOperator::hermitian_part(&partial_trace_b(p, dim_a, dim_b)?);
    let d = support_projector(&reduced)?;
    let d_ext = kron(&d, &ComplexMatrix::identity(dim_b));
    let v = psi.amplitudes();
    let pv = p.apply(v);
    let perp: Vec<C64> = v.iter().zip(&pv).map(|(a, b)| a - b).collect();
    let perp_weight: f64 = perp.iter().map(|z| z.norm_sqr()).sum();
    let lhs = d_ext.expectation(&perp).re;
    let rhs = d_ext.expectation(v).re * perp_weight;
    Ok(ProjSuppOutcome {
        lhs,
        rhs,
        holds: lhs <= rhs + PROJSUPP_SLACK,
    })
}

/// One random instance: Haar rank-`rank` projector and Haar state.
pub fn projsupp_check(
    dim_a: usize,
    dim_b: usize,
    rank: usize,
    rng: &mut RngStream,
) -> Result<ProjSuppOutcome> {
    let n = dim_a * dim_b;
    if rank > n {
        return Err(Error::param(format!("rank {rank} exceeds {dim_a}x{dim_b}")));
    }
    let p = random_projector(n, rank, rng)?;
    let psi = haar_pure_state(n, rng)?;
    projsupp_evaluate(&p, &psi, dim_a, dim_b)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ProjSuppSummary {
    pub instances: u64,
    pub failures: u64,
    /// Largest `lhs - rhs` seen (negative when every instance has room).
    pub max_excess: f64,
}

/// Runs `n` independent instances in parallel.
pub fn projsupp_suite(
    dim_a: usize,
    dim_b: usize,
    rank: usize,
    n: usize,
    rng: &mut RngStream,
) -> Result<ProjSuppSummary> {
    if rank == 0 || rank > dim_a * dim_b {
        return Err(Error::param(format!(
            "rank {rank} outside 1..={}",
            dim_a * dim_b
        )));
    }
    let root = rng.fork();
    let outcomes = map_trials(n, &root, |_, rng| projsupp_check(dim_a, dim_b, rank, rng));
    let mut summary = ProjSuppSummary {
        instances: n as u64,
        failures: 0,
        max_excess: f64::NEG_INFINITY,
    };
    for o in outcomes {
        let o = o?;
        if !o.holds {
            summary.failures += 1;
        }
        summary.max_excess = summary.max_excess.max(o.lhs - o.rhs);
    }
    Ok(summary)
}

/// `exp(-t(δ - ln(1+δ))/ln 2)`.
pub fn projconc_bound(t: usize, delta_param: f64) -> f64 {
    (-(t as f64) * (delta_param - delta_param.ln_1p()) / std::f64::consts::LN_2).exp()
}

/// Empirical `Pr_U[tr[UPU†|ψ><ψ|] >= (1+δ) t/d]` for one fixed random `|ψ>`
/// and rank-`t` projector `P`, against the concentration bound.
pub fn projconc_tail(
    d: usize,
    t: usize,
    delta_param: f64,
    n: usize,
    rng: &mut RngStream,
) -> Result<BoundCheck> {
    if t == 0 || t > d {
        return Err(Error::param(format!(
            "projconc needs 1 <= t <= d, got t={t}, d={d}"
        )));
    }
    if !(delta_param >= 0.0 && delta_param.is_finite()) {
        return Err(Error::param(format!(
            "delta must be >= 0, got {delta_param}"
        )));
    }
    check_samples(n)?;
    let psi = haar_pure_state(d, rng)?;
    let w = haar_isometry(t, d, rng)?;
    let threshold = (1.0 + delta_param) * t as f64 / d as f64;
    let root = rng.fork();
    let w_adj = w.matrix().adjoint();
    let hits = map_chunks(n, &root, |len, rng| {
        let mut hits = 0u64;
        for _ in 0..len {
            let u = haar_unitary(d, rng).expect("d >= 1");
            // <ψ|U P U†|ψ> = ‖W†U†ψ‖².
            let y = w_adj.apply(&u.adjoint().apply(psi.amplitudes()));
            let overlap: f64 = y.iter().map(|z| z.norm_sqr()).sum();
            if overlap >= threshold {
                hits += 1;
            }
        }
        hits
    });
    let hits = pairwise_reduce(hits, |a, b| a + b).unwrap_or(0);
    Ok(BoundCheck::at_most(
        frequency(hits, n as u64),
        projconc_bound(t, delta_param),
    ))
}
