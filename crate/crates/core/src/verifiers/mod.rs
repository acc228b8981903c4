//! Closed-form values and Monte Carlo checks for the Haar-integral lemmas.
//!
//! Every Monte Carlo routine takes `&mut RngStream`, forks a fresh root from
//! it and spreads the samples over chunked substreams, so results do not
//! depend on the worker count.

mod contraction;
mod estimate;
mod moments;
mod projector;
mod suite;
mod twirl;

pub use contraction::{avg_contraction_check, avg_contraction_estimate, avg_contraction_factor};
pub use estimate::{
    frequency, BoundCheck, Direction, MatrixEstimate, MonteCarloEstimate, Verdict,
    BOUND_FLOAT_SLACK, SIGMA_MARGIN,
};
pub use moments::{
    fourth_moment_bound, fourth_moment_estimate, fourth_moment_exact, haar_state_moments,
    random_basis_bias, second_moment_estimate, second_moment_exact, uniform_povm_quantity,
    BergerCheck, HaarMoments, UniformPovmReport,
};
pub use projector::{
    projconc_bound, projconc_tail, projsupp_check, projsupp_evaluate, projsupp_suite,
    ProjSuppOutcome, ProjSuppSummary, PROJSUPP_SLACK,
};
pub use suite::{run_lemma, LemmaId, LemmaRecord, SuiteOptions};
pub use twirl::{twirl_closed_form, twirl_estimate};

use crate::error::{Error, Result};
use crate::linalg::HermitianOperator;
use crate::sampling::{random_density, RngStream};

/// Maximum `|tr Δ|` accepted as traceless.
pub const TRACELESS_TOL: f64 = 1e-9;

pub(crate) fn require_traceless(delta: &HermitianOperator, d: usize) -> Result<()> {
    if d == 0 || delta.dim() != d {
        return Err(Error::dims(format!(
            "operator is {0}x{0}, expected d={d} >= 1",
            delta.dim()
        )));
    }
    let tr = delta.trace();
    if tr.abs() > TRACELESS_TOL {
        return Err(Error::param(format!(
            "operator must be traceless, trace is {tr:e}"
        )));
    }
    Ok(())
}

pub(crate) fn check_samples(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::param(format!("need at least 2 samples, got {n}")));
    }
    Ok(())
}

/// `ρ - σ` for two random states of independent uniformly chosen ranks.
pub fn random_state_difference(d: usize, rng: &mut RngStream) -> Result<HermitianOperator> {
    if d == 0 {
        return Err(Error::param("dimension must be >= 1"));
    }
    let r1 = 1 + rng.below(d as u64) as usize;
    let r2 = 1 + rng.below(d as u64) as usize;
    let rho = random_density(d, r1, rng)?;
    let sigma = random_density(d, r2, rng)?;
    rho.difference(&sigma)
}
