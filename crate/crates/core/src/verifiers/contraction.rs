use super::{check_samples, BoundCheck, MonteCarloEstimate};
use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{DensityMatrix, HermitianOperator};
use crate::parallel::monte_carlo;
use crate::sampling::{haar_unitary, RngStream};

/// `d(e²-1)/(e(d²-1))`, the largest average fraction of `‖Δ‖₂²` a channel
/// `C^d -> C^e` can keep. Taken as 1 at `d = 1`, where every `Δ` is zero.
pub fn avg_contraction_factor(d: usize, e: usize) -> f64 {
    if d <= 1 {
        return 1.0;
    }
    let (d, e) = (d as f64, e as f64);
    d * (e * e - 1.0) / (e * (d * d - 1.0))
}

/// Monte Carlo estimate of `E_U ‖E(UΔU†)‖₂²`.
pub fn avg_contraction_estimate(
    ch: &KrausChannel,
    delta: &HermitianOperator,
    n: usize,
    rng: &mut RngStream,
) -> Result<MonteCarloEstimate> {
    let d = ch.dim_in();
    if delta.dim() != d {
        return Err(Error::dims(format!(
            "operator dimension {} differs from channel input {d}",
            delta.dim()
        )));
    }
    check_samples(n)?;
    let root = rng.fork();
    let stats = monte_carlo(n, &root, |rng| {
        let u = haar_unitary(d, rng).expect("d >= 1");
        let x = delta.conjugate_by(&u);
        ch.apply(&x).expect("dimension checked").trace_sq()
    });
    Ok(stats.into())
}

/// Checks `E_U ‖E(UρU†) - E(UσU†)‖₂² <= d(e²-1)/(e(d²-1)) ‖ρ-σ‖₂²` at
/// three standard errors.
pub fn avg_contraction_check(
    ch: &KrausChannel,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    n: usize,
    rng: &mut RngStream,
) -> Result<BoundCheck> {
    let delta = rho.difference(sigma)?;
    let estimate = avg_contraction_estimate(ch, &delta, n, rng)?;
    let bound = avg_contraction_factor(ch.dim_in(), ch.dim_out()) * delta.trace_sq();
    Ok(BoundCheck::at_most(estimate, bound))
}
